#include "promptrouter/reasoner.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/http.hpp"
#include "promptrouter/prompt_rules.hpp"
#include "promptrouter/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace promptrouter {

using nlohmann::json;

namespace {

bool is_slot_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string strip_quotes(std::string_view s) {
    s = text::trim(s);
    while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'') ||
                             (s.front() == '`' && s.back() == '`'))) {
        s = text::trim(s.substr(1, s.size() - 2));
    }
    return std::string(s);
}

enum class AnswerShape { Label, LabelList, Rewrite };

AnswerShape shape_of(std::string_view template_name) {
    if (template_name == templates::kTreeMatch || template_name == templates::kModelSelect) return AnswerShape::Label;
    if (template_name == templates::kTreeBuild) return AnswerShape::LabelList;
    if (template_name == templates::kPromptParse || template_name == templates::kPromptExtend) {
        return AnswerShape::Rewrite;
    }
    throw ReasonerError(ReasonerError::Kind::UnknownTemplate, "unknown template '" + std::string(template_name) + "'");
}

std::vector<std::string> dedup_labels(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : raw) {
        auto label = text::normalize_label(strip_quotes(r));
        if (!label.empty() && seen.insert(label).second) out.push_back(std::move(label));
    }
    return out;
}

const std::string& slot(const SlotMap& slots, std::string_view name) {
    const auto it = slots.find(name);
    if (it == slots.end()) {
        throw ReasonerError(ReasonerError::Kind::UnfilledSlot, "unfilled slot {" + std::string(name) + "}");
    }
    return it->second;
}

std::string single_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

}  // namespace

ReasonerTemplate::ReasonerTemplate(std::string name, std::string body) : name_(std::move(name)), body_(std::move(body)) {
    for (std::size_t i = 0; i < body_.size(); ++i) {
        if (body_[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < body_.size() && is_slot_char(body_[j])) ++j;
        if (j > i + 1 && j < body_.size() && body_[j] == '}') {
            std::string s = body_.substr(i + 1, j - i - 1);
            if (std::find(slots_.begin(), slots_.end(), s) == slots_.end()) slots_.push_back(std::move(s));
            i = j;
        }
    }
}

std::string ReasonerTemplate::fill(const SlotMap& values) const {
    std::vector<std::string> missing;
    for (const auto& s : slots_) {
        if (values.find(s) == values.end()) missing.push_back("{" + s + "}");
    }
    if (!missing.empty()) {
        throw ReasonerError(ReasonerError::Kind::UnfilledSlot,
                            "template '" + name_ + "' has unfilled slots: " + text::join(missing, ", "));
    }
    std::string out;
    out.reserve(body_.size());
    for (std::size_t i = 0; i < body_.size(); ++i) {
        if (body_[i] == '{') {
            std::size_t j = i + 1;
            while (j < body_.size() && is_slot_char(body_[j])) ++j;
            if (j > i + 1 && j < body_.size() && body_[j] == '}') {
                out += values.find(std::string_view(body_).substr(i + 1, j - i - 1))->second;
                i = j;
                continue;
            }
        }
        out.push_back(body_[i]);
    }
    return out;
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir) {
    TemplateSet set;
    for (auto name : templates::kAll) {
        const auto file = dir / (std::string(name) + ".txt");
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            throw ReasonerError(ReasonerError::Kind::UnknownTemplate, "missing template file " + file.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        set.add(ReasonerTemplate(std::string(name), ss.str()));
    }
    return set;
}

void TemplateSet::add(ReasonerTemplate t) {
    auto name = t.name();
    templates_.insert_or_assign(std::move(name), std::move(t));
}

const ReasonerTemplate& TemplateSet::get(std::string_view name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw ReasonerError(ReasonerError::Kind::UnknownTemplate, "template '" + std::string(name) + "' not registered");
    }
    return it->second;
}

bool TemplateSet::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

std::string TemplateSet::fingerprint() const {
    std::string all;
    for (const auto& [name, t] : templates_) {
        all += name;
        all += '\0';
        all += codec::sha256_hex(t.body());
        all += '\0';
    }
    return codec::sha256_hex(all);
}

ReasonerAnswer extract_answer(std::string_view template_name, std::string raw) {
    const AnswerShape shape = shape_of(template_name);

    std::optional<std::string> body;
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        const auto t = text::trim(line);
        if (t.size() >= kAnswerSentinel.size() &&
            text::to_lower(t.substr(0, kAnswerSentinel.size())) == text::to_lower(kAnswerSentinel)) {
            body = std::string(text::trim(t.substr(kAnswerSentinel.size())));
        }
    }
    if (!body) {
        throw ReasonerError(ReasonerError::Kind::Unparseable,
                            "answer to '" + std::string(template_name) + "' lacks the " +
                                std::string(kAnswerSentinel) + " line");
    }

    ReasonerAnswer answer{std::move(raw), Label{}};
    switch (shape) {
        case AnswerShape::Label: {
            auto value = strip_quotes(*body);
            if (value.empty()) {
                throw ReasonerError(ReasonerError::Kind::Unparseable,
                                    "empty label answer to '" + std::string(template_name) + "'");
            }
            answer.parsed = Label{std::move(value)};
            break;
        }
        case AnswerShape::LabelList: answer.parsed = LabelList{dedup_labels(text::split(*body, '|'))}; break;
        case AnswerShape::Rewrite: answer.parsed = Rewrite{strip_quotes(*body)}; break;
    }
    return answer;
}

const ReasonerTemplate& Reasoner::require(std::string_view name) const {
    shape_of(name);
    return templates_.get(name);
}

std::string Reasoner::choose_label(std::span<const std::string> candidates, std::string_view query) const {
    if (candidates.empty()) throw ReasonerError(ReasonerError::Kind::EmptyCandidates, "choose_label needs candidates");
    if (candidates.size() == 1) return candidates.front();

    std::vector<std::string> listed(candidates.begin(), candidates.end());
    const auto answer = ask(templates::kTreeMatch, {{"categories", text::join(listed, "|")}, {"prompt", std::string(query)}});
    const auto& picked = std::get<Label>(answer.parsed).value;
    const auto key = text::normalize_label(picked);
    for (const auto& c : candidates) {
        if (text::normalize_label(c) == key) return c;
    }
    throw ReasonerError(ReasonerError::Kind::Unparseable, "answer '" + picked + "' is not one of the candidates");
}

RuleBasedReasoner::RuleBasedReasoner(TemplateSet templates, Lexicon lexicon)
    : Reasoner(std::move(templates)), lexicon_(std::move(lexicon)) {}

std::string RuleBasedReasoner::id() const { return "rule-based:" + lexicon_.fingerprint().substr(0, 12); }

std::string RuleBasedReasoner::choose_label(std::span<const std::string> candidates, std::string_view query) const {
    if (candidates.empty()) throw ReasonerError(ReasonerError::Kind::EmptyCandidates, "choose_label needs candidates");

    const bool offers_none = candidates.size() > 1 && text::normalize_label(candidates.back()) == kNoneOfThese;
    const std::size_t scored = offers_none ? candidates.size() - 1 : candidates.size();
    const auto query_words = text::words(query);

    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < scored; ++i) {
        const double s = overlap_score(lexicon_, query_words, text::normalize_label(candidates[i]));
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    if (offers_none && best_score <= 0.0) return candidates.back();
    return candidates[best];
}

std::string RuleBasedReasoner::answer_text(std::string_view name, const SlotMap& slots) const {
    if (name == templates::kPromptParse) {
        const auto& input = slot(slots, "prompt");
        const auto type = prompt_type_from_string(slot(slots, "prompt_type")).value_or(rules::classify(input, lexicon_));
        return rules::extract_core(input, type, lexicon_);
    }
    if (name == templates::kTreeBuild) return text::join(dedup_labels(text::split(slot(slots, "tags"), '|')), " | ");
    if (name == templates::kTreeMatch || name == templates::kModelSelect) {
        const auto& listed = slot(slots, name == templates::kTreeMatch ? "categories" : "models");
        std::vector<std::string> candidates;
        for (const auto& c : text::split(listed, '|')) {
            if (!text::trim(c).empty()) candidates.emplace_back(text::trim(c));
        }
        return choose_label(candidates, slot(slots, "prompt"));
    }
    // prompt_extend
    std::vector<std::string> examples;
    for (const auto& e : text::split(slot(slots, "examples"), '\n')) {
        if (!text::trim(e).empty()) examples.emplace_back(text::trim(e));
    }
    return rules::extend_with_examples(slot(slots, "prompt"), examples, lexicon_);
}

ReasonerAnswer RuleBasedReasoner::ask(std::string_view template_name, const SlotMap& slots) const {
    require(template_name).fill(slots);
    std::string raw = std::string(kAnswerSentinel) + " " + single_line(answer_text(template_name, slots));
    return extract_answer(template_name, std::move(raw));
}

RemoteReasoner::RemoteReasoner(TemplateSet templates, RemoteReasonerOptions options)
    : Reasoner(std::move(templates)), options_(std::move(options)) {
    if (options_.base_url.empty()) throw ConfigError("remote reasoner needs a base URL");
    if (options_.api_key.empty()) {
        if (const char* key = std::getenv("PROMPTROUTER_LLM_KEY")) options_.api_key = key;
    }
    const auto url = http::parse_url(options_.base_url);
    path_ = url.path == "/" ? std::string{} : url.path;
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += path_.ends_with("/v1") ? "/chat/completions" : "/v1/chat/completions";
    pool_ = std::make_unique<http::ClientPool>(url.origin, options_.timeout, options_.pool_size);
}

RemoteReasoner::~RemoteReasoner() = default;

std::string RemoteReasoner::id() const { return "remote:" + options_.model + "@" + options_.base_url; }

std::string RemoteReasoner::complete(const std::string& prompt) const {
    const json request{{"model", options_.model},
                       {"temperature", 0},
                       {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    http::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        http::Response res;
        try {
            res = pool_->post_json(path_, request.dump(), headers);
        } catch (const http::TransportError& e) {
            last_error = e.what();
            continue;
        }
        if (res.status >= 500) {
            last_error = "LLM backend returned status " + std::to_string(res.status);
            continue;
        }
        if (res.status != 200) {
            throw ReasonerError(ReasonerError::Kind::Transport,
                                "LLM backend returned status " + std::to_string(res.status));
        }
        try {
            const auto body = json::parse(res.body);
            return body.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ReasonerError(ReasonerError::Kind::Unparseable, std::string("malformed chat completion: ") + e.what());
        }
    }
    throw ReasonerError(ReasonerError::Kind::Transport, last_error);
}

ReasonerAnswer RemoteReasoner::ask(std::string_view template_name, const SlotMap& slots) const {
    const std::string prompt = require(template_name).fill(slots);
    for (int attempt = 0;; ++attempt) {
        try {
            return extract_answer(template_name, complete(prompt));
        } catch (const ReasonerError& e) {
            if (e.kind() != ReasonerError::Kind::Unparseable || attempt >= 1) throw;
        }
    }
}

}  // namespace promptrouter
