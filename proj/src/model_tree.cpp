#include "promptrouter/model_tree.hpp"

#include "promptrouter/errors.hpp"
#include "promptrouter/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace promptrouter {

using nlohmann::json;

namespace {

std::vector<std::string> normalized_union(const Catalog& catalog, std::vector<std::string> ModelCard::*field) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& card : catalog.cards()) {
        for (const auto& tag : card.*field) {
            auto label = text::normalize_label(tag);
            if (!label.empty() && seen.insert(label).second) out.push_back(std::move(label));
        }
    }
    return out;
}

std::string tag_query(const ModelCard& card) { return text::join(card.all_tags(), ", "); }

std::vector<std::string> ask_categories(const Reasoner& reasoner, std::string_view domain,
                                        const std::vector<std::string>& domain_tags,
                                        const std::vector<std::string>& all_tags) {
    const auto answer = reasoner.ask(templates::kTreeBuild, {{"domain", std::string(domain)},
                                                             {"tags", text::join(domain_tags, "|")},
                                                             {"all_tags", text::join(all_tags, "|")}});
    return std::get<LabelList>(answer.parsed).values;
}

SubjectNode* find_subject(ModelTree& tree, std::string_view label) {
    const auto it = std::find_if(tree.subjects.begin(), tree.subjects.end(),
                                 [&](const SubjectNode& s) { return s.label == label; });
    return it == tree.subjects.end() ? nullptr : &*it;
}

StyleNode& style_node(SubjectNode& subject, std::string_view label) {
    const auto it = std::find_if(subject.styles.begin(), subject.styles.end(),
                                 [&](const StyleNode& s) { return s.label == label; });
    if (it != subject.styles.end()) return *it;
    subject.styles.push_back(StyleNode{std::string(label), {}});
    return subject.styles.back();
}

std::vector<std::string> labels_of(const std::vector<SubjectNode>& nodes) {
    std::vector<std::string> out;
    for (const auto& n : nodes) out.push_back(n.label);
    return out;
}

std::vector<std::string> labels_of(const std::vector<StyleNode>& nodes) {
    std::vector<std::string> out;
    for (const auto& n : nodes) out.push_back(n.label);
    return out;
}

}  // namespace

bool ModelTree::contains(std::string_view model_id) const { return leaf_of(model_id).has_value(); }

std::optional<std::pair<std::string, std::string>> ModelTree::leaf_of(std::string_view model_id) const {
    for (const auto& s : subjects) {
        for (const auto& st : s.styles) {
            if (std::find(st.model_ids.begin(), st.model_ids.end(), model_id) != st.model_ids.end()) {
                return std::make_pair(s.label, st.label);
            }
        }
    }
    return std::nullopt;
}

std::vector<std::string> ModelTree::model_ids() const {
    std::vector<std::string> out;
    for (const auto& s : subjects) {
        for (const auto& st : s.styles) out.insert(out.end(), st.model_ids.begin(), st.model_ids.end());
    }
    return out;
}

void to_json(json& j, const ModelTree& tree) {
    json subjects = json::array();
    for (const auto& s : tree.subjects) {
        json styles = json::array();
        for (const auto& st : s.styles) styles.push_back({{"label", st.label}, {"model_ids", st.model_ids}});
        subjects.push_back({{"label", s.label}, {"styles", std::move(styles)}});
    }
    j = json{{"catalog_version", tree.catalog_version}, {"subjects", std::move(subjects)}};
}

void from_json(const json& j, ModelTree& tree) {
    ModelTree out;
    try {
        out.catalog_version = j.at("catalog_version").get<std::int64_t>();
        for (const auto& s : j.at("subjects")) {
            SubjectNode node{s.at("label").get<std::string>(), {}};
            for (const auto& st : s.at("styles")) {
                node.styles.push_back(
                    StyleNode{st.at("label").get<std::string>(), st.at("model_ids").get<std::vector<std::string>>()});
            }
            out.subjects.push_back(std::move(node));
        }
    } catch (const json::exception& e) {
        throw TreeError(std::string("malformed tree document: ") + e.what());
    }
    if (const auto problems = check_tree(out); !problems.empty()) {
        throw TreeError("invalid tree document: " + text::join(problems, "; "));
    }
    tree = std::move(out);
}

ModelTree build_tree(const Catalog& catalog, const Reasoner& reasoner) {
    if (catalog.empty()) throw TreeError("cannot build a model tree over an empty catalog");

    std::vector<std::string> all_tags;
    for (const auto& card : catalog.cards()) {
        for (auto& t : card.all_tags()) all_tags.push_back(std::move(t));
    }
    auto subject_categories = ask_categories(reasoner, "subject", normalized_union(catalog, &ModelCard::subject_tags), all_tags);
    const auto style_categories = ask_categories(reasoner, "style", normalized_union(catalog, &ModelCard::style_tags), all_tags);
    if (subject_categories.empty()) subject_categories.emplace_back(kGeneralStyle);

    std::map<std::string, std::map<std::string, std::vector<std::string>>> placement;
    for (const auto& card : catalog.cards()) {
        const auto query = tag_query(card);
        const auto subject = reasoner.choose_label(subject_categories, query);
        const auto style = (card.style_tags.empty() || style_categories.empty())
                               ? std::string(kGeneralStyle)
                               : reasoner.choose_label(style_categories, query);
        placement[subject][style].push_back(card.id);
    }

    auto style_order = style_categories;
    if (std::find(style_order.begin(), style_order.end(), kGeneralStyle) == style_order.end()) {
        style_order.emplace_back(kGeneralStyle);
    }

    ModelTree tree;
    tree.catalog_version = catalog.version();
    for (const auto& subject : subject_categories) {
        const auto s = placement.find(subject);
        if (s == placement.end()) continue;
        SubjectNode node{subject, {}};
        for (const auto& style : style_order) {
            const auto st = s->second.find(style);
            if (st != s->second.end() && !st->second.empty()) node.styles.push_back(StyleNode{style, st->second});
        }
        if (!node.styles.empty()) tree.subjects.push_back(std::move(node));
    }
    return tree;
}

ModelTree insert_model(const ModelTree& tree, const ModelCard& card, const Reasoner& reasoner) {
    if (tree.contains(card.id)) throw TreeError("model '" + card.id + "' is already in the tree");

    const auto query = tag_query(card);
    const std::string own_subject = card.subject_tags.empty() ? std::string{} : text::normalize_label(card.subject_tags.front());
    const std::string own_style = card.style_tags.empty() ? std::string{} : text::normalize_label(card.style_tags.front());

    ModelTree out = tree;
    out.catalog_version = tree.catalog_version + 1;

    SubjectNode* subject = nullptr;
    bool fresh_subject = false;
    if (out.subjects.empty()) {
        out.subjects.push_back(SubjectNode{own_subject.empty() ? std::string(kGeneralStyle) : own_subject, {}});
        subject = &out.subjects.back();
        fresh_subject = true;
    } else {
        auto candidates = labels_of(out.subjects);
        candidates.emplace_back(kNoneOfThese);
        const auto pick = reasoner.choose_label(candidates, query);
        if (pick != kNoneOfThese) {
            subject = find_subject(out, pick);
        } else if (!own_subject.empty()) {
            subject = find_subject(out, own_subject);
            if (subject == nullptr) {
                out.subjects.push_back(SubjectNode{own_subject, {}});
                subject = &out.subjects.back();
                fresh_subject = true;
            }
        } else {
            subject = &out.subjects.front();
        }
    }

    std::string style;
    if (own_style.empty()) {
        style = kGeneralStyle;
    } else if (fresh_subject || subject->styles.empty()) {
        style = own_style;
    } else {
        auto candidates = labels_of(subject->styles);
        candidates.emplace_back(kNoneOfThese);
        const auto pick = reasoner.choose_label(candidates, query);
        style = pick == kNoneOfThese ? own_style : pick;
    }
    style_node(*subject, style).model_ids.push_back(card.id);
    return out;
}

ModelTree reconcile_tree(const ModelTree& tree, const Catalog& catalog, const Reasoner& reasoner, std::int64_t max_drift) {
    const auto drift = catalog.version() - tree.catalog_version;
    const auto ids = tree.model_ids();
    const bool stale = std::any_of(ids.begin(), ids.end(), [&](const std::string& id) { return !catalog.contains(id); });
    if (tree.empty() || stale || drift < 0 || drift > max_drift) return build_tree(catalog, reasoner);

    ModelTree out = tree;
    for (const auto& card : catalog.cards()) {
        if (!out.contains(card.id)) out = insert_model(out, card, reasoner);
    }
    out.catalog_version = catalog.version();
    return out;
}

ModelTree load_tree(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TreeError("cannot open tree " + path.string());
    try {
        return json::parse(in).get<ModelTree>();
    } catch (const json::exception& e) {
        throw TreeError("malformed tree " + path.string() + ": " + e.what());
    }
}

void save_tree(const ModelTree& tree, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw TreeError("cannot write " + tmp.string());
        out << json(tree).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

CandidateSet search_tree(const ModelTree& tree, std::string_view core, const Reasoner& reasoner, SearchOptions options) {
    if (tree.empty()) throw TreeError("cannot search an empty model tree");
    if (text::trim(core).empty()) throw TreeError("cannot search with an empty prompt");

    CandidateSet out;
    const std::string query(core);
    const auto decide = [&](std::vector<std::string> candidates) {
        auto chosen = reasoner.choose_label(candidates, query);
        out.trace.push_back(SearchStep{std::move(candidates), query, chosen});
        return chosen;
    };

    if (options.beam_width <= 1) {
        const auto subject_label = decide(labels_of(tree.subjects));
        const auto& subject = *std::find_if(tree.subjects.begin(), tree.subjects.end(),
                                            [&](const SubjectNode& s) { return s.label == subject_label; });
        const auto style_label = decide(labels_of(subject.styles));
        const auto& style = *std::find_if(subject.styles.begin(), subject.styles.end(),
                                          [&](const StyleNode& s) { return s.label == style_label; });
        out.subject = subject.label;
        out.style = style.label;
        out.model_ids = style.model_ids;
        return out;
    }

    // Beam: rank subjects by repeated picks, then choose among every
    // "subject / style" leaf of the kept subjects.
    auto remaining = labels_of(tree.subjects);
    std::vector<std::string> kept;
    while (!remaining.empty() && kept.size() < options.beam_width) {
        auto pick = decide(remaining);
        std::erase(remaining, pick);
        kept.push_back(std::move(pick));
    }
    std::vector<std::string> leaves;
    std::vector<std::pair<const SubjectNode*, const StyleNode*>> nodes;
    for (const auto& label : kept) {
        const auto& subject = *std::find_if(tree.subjects.begin(), tree.subjects.end(),
                                            [&](const SubjectNode& s) { return s.label == label; });
        for (const auto& style : subject.styles) {
            leaves.push_back(subject.label + " / " + style.label);
            nodes.emplace_back(&subject, &style);
        }
    }
    const auto leaf = decide(leaves);
    const auto idx = static_cast<std::size_t>(std::find(leaves.begin(), leaves.end(), leaf) - leaves.begin());
    out.subject = nodes[idx].first->label;
    out.style = nodes[idx].second->label;
    out.model_ids = nodes[idx].second->model_ids;
    return out;
}

std::vector<std::string> check_tree(const ModelTree& tree) {
    std::vector<std::string> problems;
    std::set<std::string> subject_labels;
    std::set<std::string> ids;
    for (const auto& s : tree.subjects) {
        if (!subject_labels.insert(s.label).second) problems.push_back("duplicate subject label '" + s.label + "'");
        if (s.styles.empty()) problems.push_back("subject '" + s.label + "' has no styles");
        std::set<std::string> style_labels;
        for (const auto& st : s.styles) {
            if (!style_labels.insert(st.label).second) {
                problems.push_back("duplicate style label '" + st.label + "' under '" + s.label + "'");
            }
            if (st.model_ids.empty()) problems.push_back("style '" + s.label + "/" + st.label + "' has no models");
            for (const auto& id : st.model_ids) {
                if (!ids.insert(id).second) problems.push_back("model '" + id + "' appears in more than one leaf");
            }
        }
    }
    return problems;
}

}  // namespace promptrouter
