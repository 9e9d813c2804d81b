#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

/// One expert generative model as published on a model hub. The record is a
/// reconstruction: hubs expose tag attributes and showcase prompts, the rest
/// is what the router needs to dispatch to it.
struct ModelCard {
    std::string id;
    std::string name;
    std::vector<std::string> subject_tags;
    std::vector<std::string> style_tags;
    std::vector<std::string> free_tags;
    std::vector<std::string> example_prompts;
    std::string base_model;
    std::int64_t popularity = 0;
    std::optional<std::string> endpoint;

    /// subject, style and free tags in that order.
    std::vector<std::string> all_tags() const;

    bool operator==(const ModelCard&) const = default;
};

void to_json(nlohmann::json& j, const ModelCard& card);
/// Strict: every schema key except `popularity` must be present with the
/// right type. Throws CatalogError naming the card id when it can be read.
void from_json(const nlohmann::json& j, ModelCard& card);

/// One entry per violated invariant; empty means the card is valid.
using ValidationReport = std::vector<std::string>;

ValidationReport validate_card(const ModelCard& card);

/// Immutable catalog snapshot. Mutating operations return a new value with
/// `version() + 1` and leave the receiver untouched.
class Catalog {
public:
    Catalog() = default;
    /// Validates every card and the id-uniqueness invariant.
    Catalog(std::vector<ModelCard> cards, std::int64_t version);

    const std::vector<ModelCard>& cards() const noexcept { return cards_; }
    std::int64_t version() const noexcept { return version_; }
    std::size_t size() const noexcept { return cards_.size(); }
    bool empty() const noexcept { return cards_.empty(); }

    const ModelCard* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    std::vector<std::string> ids() const;

    bool operator==(const Catalog&) const = default;

private:
    std::vector<ModelCard> cards_;
    std::int64_t version_ = 0;
};

/// Accepts a catalog directory (one `<id>.json` per card plus `index.json`),
/// a `.jsonl` file with one card per line, or a `.json` file holding an
/// array of cards. Loaded catalogs without an index start at version 1.
Catalog load_catalog(const std::filesystem::path& path);

/// Writes the directory layout read by load_catalog. Card files not listed in
/// the catalog are left alone.
void save_catalog(const Catalog& catalog, const std::filesystem::path& dir);

Catalog add_model(const Catalog& catalog, ModelCard card);

}  // namespace promptrouter
