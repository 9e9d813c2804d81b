#pragma once

#include "promptrouter/catalog.hpp"
#include "promptrouter/reasoner.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace promptrouter {

/// Style node created for cards that carry no style tag.
inline constexpr std::string_view kGeneralStyle = "general";

struct StyleNode {
    std::string label;
    std::vector<std::string> model_ids;

    bool operator==(const StyleNode&) const = default;
};

struct SubjectNode {
    std::string label;
    std::vector<StyleNode> styles;

    bool operator==(const SubjectNode&) const = default;
};

/// Two category levels (subject, then style) above the model leaves. Every
/// catalog id sits in exactly one leaf and no node is empty.
struct ModelTree {
    std::vector<SubjectNode> subjects;
    std::int64_t catalog_version = 0;

    bool empty() const noexcept { return subjects.empty(); }
    bool contains(std::string_view model_id) const;
    /// (subject, style) of the leaf holding `model_id`.
    std::optional<std::pair<std::string, std::string>> leaf_of(std::string_view model_id) const;
    /// Leaf ids flattened in tree order.
    std::vector<std::string> model_ids() const;

    bool operator==(const ModelTree&) const = default;
};

void to_json(nlohmann::json& j, const ModelTree& tree);
void from_json(const nlohmann::json& j, ModelTree& tree);

ModelTree load_tree(const std::filesystem::path& path);
/// Atomic write (temporary file, then rename).
void save_tree(const ModelTree& tree, const std::filesystem::path& path);

/// One choose_label decision made while searching: replaying
/// `reasoner.choose_label(candidates, query)` must give back `chosen`.
struct SearchStep {
    std::vector<std::string> candidates;
    std::string query;
    std::string chosen;

    bool operator==(const SearchStep&) const = default;
};

struct CandidateSet {
    std::vector<std::string> model_ids;
    std::string subject;
    std::string style;
    std::vector<SearchStep> trace;

    bool operator==(const CandidateSet&) const = default;
};

struct SearchOptions {
    /// Subjects kept after the first level. 1 is the greedy best-label
    /// search; wider beams pick the final leaf among all (subject, style)
    /// pairs of the kept subjects.
    std::size_t beam_width = 1;
};

ModelTree build_tree(const Catalog& catalog, const Reasoner& reasoner);

/// Places one new card. A new subject (or style) node is created only when
/// the reasoner picks kNoneOfThese and the card has its own tag to name the
/// node after. The returned tree's catalog_version is one past the input's,
/// matching add_model.
ModelTree insert_model(const ModelTree& tree, const ModelCard& card, const Reasoner& reasoner);

/// Brings a tree up to `catalog`: rebuilds when the version drift exceeds
/// `max_drift` or the tree holds ids the catalog lacks, otherwise inserts
/// the missing cards one by one.
ModelTree reconcile_tree(const ModelTree& tree, const Catalog& catalog, const Reasoner& reasoner,
                         std::int64_t max_drift = std::numeric_limits<std::int64_t>::max());

CandidateSet search_tree(const ModelTree& tree, std::string_view core, const Reasoner& reasoner,
                         SearchOptions options = {});

/// Structural invariants: unique sibling labels, no empty node, no id in two
/// leaves. Returns one message per violation.
std::vector<std::string> check_tree(const ModelTree& tree);

}  // namespace promptrouter
