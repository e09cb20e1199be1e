#include "coconstruct/stats.hpp"

#include <sstream>

#include <json.hpp>

#include "coconstruct/scheme.hpp"

namespace coco {

SchemeStats compute_stats(const Document& doc, const ConvertOptions& opts) {
    SchemeStats s;
    for (const auto& sent : doc.sentences) {
        ++s.sentences;
        bool has_backchannel = false;
        for (const auto& t : sent.tokens) {
            if (!t.is_word()) continue;
            ++s.tokens;
            std::vector<std::string> ignored;
            SchemeFeatures f = parse_scheme_features(t.misc, &ignored);
            if (f.coconstruct) {
                ++s.coconstruct_tokens;
                ++s.by_deprel[f.coconstruct->deprel];
            }
            if (f.backchannel) has_backchannel = true;
            if (f.scrap) ++s.scrap_tokens;
            if (f.promotion) ++s.promotion_by_label[*f.promotion];
        }
        if (has_backchannel) ++s.backchannel_sentences;
    }
    for (const auto& unit : cluster_units(doc, opts))
        if (unit.members.size() > 1) ++s.units_multi_member;
    return s;
}

SchemeStats merge_stats(const SchemeStats& a, const SchemeStats& b) {
    SchemeStats s = a;
    s.sentences += b.sentences;
    s.tokens += b.tokens;
    s.backchannel_sentences += b.backchannel_sentences;
    s.coconstruct_tokens += b.coconstruct_tokens;
    s.scrap_tokens += b.scrap_tokens;
    s.units_multi_member += b.units_multi_member;
    for (const auto& [k, v] : b.by_deprel) s.by_deprel[k] += v;
    for (const auto& [k, v] : b.promotion_by_label) s.promotion_by_label[k] += v;
    return s;
}

std::string render_stats_tsv(const SchemeStats& stats) {
    std::ostringstream out;
    out << "metric\tvalue\n";
    out << "sentences\t" << stats.sentences << '\n';
    out << "tokens\t" << stats.tokens << '\n';
    out << "backchannel_sentences\t" << stats.backchannel_sentences << '\n';
    out << "coconstruct_tokens\t" << stats.coconstruct_tokens << '\n';
    out << "scrap_tokens\t" << stats.scrap_tokens << '\n';
    out << "units_multi_member\t" << stats.units_multi_member << '\n';
    for (const auto& [k, v] : stats.by_deprel)
        out << "coconstruct_deprel:" << k << '\t' << v << '\n';
    for (const auto& [k, v] : stats.promotion_by_label)
        out << "promotion:" << k << '\t' << v << '\n';
    return out.str();
}

std::string render_stats_json(const SchemeStats& stats) {
    nlohmann::json by_deprel(nlohmann::json::value_t::object);
    for (const auto& [k, v] : stats.by_deprel) by_deprel[k] = v;
    nlohmann::json promotion(nlohmann::json::value_t::object);
    for (const auto& [k, v] : stats.promotion_by_label) promotion[k] = v;
    nlohmann::json j{
        {"sentences", stats.sentences},
        {"tokens", stats.tokens},
        {"backchannel_sentences", stats.backchannel_sentences},
        {"coconstruct_tokens", stats.coconstruct_tokens},
        {"scrap_tokens", stats.scrap_tokens},
        {"units_multi_member", stats.units_multi_member},
        {"by_deprel", by_deprel},
        {"promotion_by_label", promotion},
    };
    return j.dump(2) + "\n";
}

}  // namespace coco
