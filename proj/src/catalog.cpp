#include "promptrouter/catalog.hpp"

#include "promptrouter/errors.hpp"
#include "promptrouter/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace promptrouter {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kIndexFile = "index.json";

bool is_url_safe(std::string_view id) {
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '~';
    });
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CatalogError("cannot write " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, path);
}

std::vector<std::string> string_list(const json& j, const char* key, const std::string& id) {
    const auto it = j.find(key);
    if (it == j.end()) throw CatalogError(std::string("missing key '") + key + "'", id);
    if (!it->is_array()) throw CatalogError(std::string("'") + key + "' must be a list of strings", id);
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw CatalogError(std::string("'") + key + "' must be a list of strings", id);
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string string_field(const json& j, const char* key, const std::string& id) {
    const auto it = j.find(key);
    if (it == j.end()) throw CatalogError(std::string("missing key '") + key + "'", id);
    if (!it->is_string()) throw CatalogError(std::string("'") + key + "' must be a string", id);
    return it->get<std::string>();
}

ModelCard parse_card(const std::string& doc, const std::string& where) {
    json j;
    try {
        j = json::parse(doc);
    } catch (const json::parse_error& e) {
        throw CatalogError("malformed card document in " + where + ": " + e.what());
    }
    return j.get<ModelCard>();
}

Catalog checked_catalog(std::vector<ModelCard> cards, std::int64_t version) {
    return Catalog(std::move(cards), version);
}

}  // namespace

std::vector<std::string> ModelCard::all_tags() const {
    std::vector<std::string> out = subject_tags;
    out.insert(out.end(), style_tags.begin(), style_tags.end());
    out.insert(out.end(), free_tags.begin(), free_tags.end());
    return out;
}

void to_json(json& j, const ModelCard& card) {
    j = json{{"id", card.id},
             {"name", card.name},
             {"subject_tags", card.subject_tags},
             {"style_tags", card.style_tags},
             {"free_tags", card.free_tags},
             {"example_prompts", card.example_prompts},
             {"base_model", card.base_model},
             {"popularity", card.popularity},
             {"endpoint", card.endpoint ? json(*card.endpoint) : json(nullptr)}};
}

void from_json(const json& j, ModelCard& card) {
    if (!j.is_object()) throw CatalogError("model card must be a JSON object");
    const auto id_it = j.find("id");
    const std::string id = (id_it != j.end() && id_it->is_string()) ? id_it->get<std::string>() : std::string{};

    ModelCard out;
    out.id = string_field(j, "id", id);
    out.name = string_field(j, "name", id);
    out.subject_tags = string_list(j, "subject_tags", id);
    out.style_tags = string_list(j, "style_tags", id);
    out.free_tags = string_list(j, "free_tags", id);
    out.example_prompts = string_list(j, "example_prompts", id);
    out.base_model = string_field(j, "base_model", id);

    if (const auto it = j.find("popularity"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw CatalogError("'popularity' must be an integer", id);
        out.popularity = it->get<std::int64_t>();
    }

    const auto ep = j.find("endpoint");
    if (ep == j.end()) throw CatalogError("missing key 'endpoint'", id);
    if (ep->is_string()) {
        out.endpoint = ep->get<std::string>();
    } else if (!ep->is_null()) {
        throw CatalogError("'endpoint' must be a string or null", id);
    }
    card = std::move(out);
}

ValidationReport validate_card(const ModelCard& card) {
    ValidationReport report;
    if (card.id.empty()) {
        report.emplace_back("id must be non-empty");
    } else if (!is_url_safe(card.id)) {
        report.emplace_back("id must be URL-safe");
    }
    if (card.subject_tags.empty() && card.style_tags.empty() && card.free_tags.empty()) {
        report.emplace_back("card must carry at least one tag");
    }
    if (card.popularity < 0) report.emplace_back("popularity must be non-negative");
    return report;
}

Catalog::Catalog(std::vector<ModelCard> cards, std::int64_t version) : cards_(std::move(cards)), version_(version) {
    std::set<std::string_view> seen;
    for (const auto& card : cards_) {
        if (const auto report = validate_card(card); !report.empty()) {
            throw CatalogError("invalid card: " + text::join(report, "; "), card.id);
        }
        if (!seen.insert(card.id).second) throw CatalogError("duplicate id", card.id);
    }
}

const ModelCard* Catalog::find(std::string_view id) const {
    const auto it = std::find_if(cards_.begin(), cards_.end(), [&](const ModelCard& c) { return c.id == id; });
    return it == cards_.end() ? nullptr : &*it;
}

std::vector<std::string> Catalog::ids() const {
    std::vector<std::string> out;
    out.reserve(cards_.size());
    for (const auto& c : cards_) out.push_back(c.id);
    return out;
}

Catalog load_catalog(const fs::path& path) {
    if (!fs::exists(path)) throw CatalogError("catalog path does not exist: " + path.string());

    std::vector<ModelCard> cards;
    std::int64_t version = 1;

    if (fs::is_directory(path)) {
        const fs::path index = path / kIndexFile;
        if (fs::exists(index)) {
            json j;
            try {
                j = json::parse(read_file(index));
            } catch (const json::parse_error& e) {
                throw CatalogError("malformed catalog index: " + std::string(e.what()));
            }
            if (!j.is_object() || !j.contains("cards") || !j["cards"].is_array()) {
                throw CatalogError("catalog index must be {\"version\": int, \"cards\": [id...]}");
            }
            version = j.value("version", std::int64_t{1});
            for (const auto& id : j["cards"]) {
                if (!id.is_string()) throw CatalogError("catalog index entries must be strings");
                const fs::path file = path / (id.get<std::string>() + ".json");
                if (!fs::exists(file)) throw CatalogError("card file listed in index is missing", id.get<std::string>());
                cards.push_back(parse_card(read_file(file), file.string()));
            }
        } else {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(path)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& file : files) cards.push_back(parse_card(read_file(file), file.string()));
        }
    } else if (path.extension() == ".jsonl") {
        std::istringstream lines(read_file(path));
        std::string line;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            cards.push_back(parse_card(line, path.string() + ":" + std::to_string(lineno)));
        }
    } else {
        json j;
        try {
            j = json::parse(read_file(path));
        } catch (const json::parse_error& e) {
            throw CatalogError("malformed catalog document " + path.string() + ": " + e.what());
        }
        if (j.is_object()) {
            cards.push_back(j.get<ModelCard>());
        } else if (j.is_array()) {
            for (const auto& c : j) cards.push_back(c.get<ModelCard>());
        } else {
            throw CatalogError("catalog document must be a card object or an array of cards");
        }
    }
    return checked_catalog(std::move(cards), version);
}

void save_catalog(const Catalog& catalog, const fs::path& dir) {
    fs::create_directories(dir);
    json index{{"version", catalog.version()}, {"cards", catalog.ids()}};
    for (const auto& card : catalog.cards()) {
        write_file(dir / (card.id + ".json"), json(card).dump(2) + "\n");
    }
    write_file(dir / kIndexFile, index.dump(2) + "\n");
}

Catalog add_model(const Catalog& catalog, ModelCard card) {
    if (const auto report = validate_card(card); !report.empty()) {
        throw CatalogError("invalid card: " + text::join(report, "; "), card.id);
    }
    if (catalog.contains(card.id)) throw CatalogError("duplicate id", card.id);
    auto cards = catalog.cards();
    cards.push_back(std::move(card));
    return checked_catalog(std::move(cards), catalog.version() + 1);
}

}  // namespace promptrouter
