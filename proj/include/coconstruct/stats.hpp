// stats.hpp - Corpus statistics over the cross-turn annotation features.

#pragma once

#include <map>
#include <string>

#include "coconstruct/conllu.hpp"
#include "coconstruct/convert.hpp"

namespace coco {

struct SchemeStats {
    long sentences = 0;
    long tokens = 0;  // word rows
    long backchannel_sentences = 0;
    long coconstruct_tokens = 0;
    long scrap_tokens = 0;
    long units_multi_member = 0;
    std::map<std::string, long> by_deprel;           // Coconstruct pointer labels
    std::map<std::string, long> promotion_by_label;  // Promotion= values
};

SchemeStats compute_stats(const Document& doc, const ConvertOptions& opts = {});

/// Component-wise sum of the additive fields (units_multi_member is only
/// meaningful when no pointer links cross the boundary).
SchemeStats merge_stats(const SchemeStats& a, const SchemeStats& b);

std::string render_stats_tsv(const SchemeStats& stats);
std::string render_stats_json(const SchemeStats& stats);

}  // namespace coco
