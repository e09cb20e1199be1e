// convert.hpp - Conversion from the speaker-based view to the
// dependency-based view: clusters pointer-linked sentences into rectional
// units, builds the intermediate tree/attach/sb graph, and projects final
// single-root trees (promotion undoing, dependent lifting, repair
// flipping, speaker metadata migration).

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coconstruct/conllu.hpp"
#include "coconstruct/scheme.hpp"

namespace coco {

enum class EdgeTag { Tree, Attach, Sb };

/// One labeled edge of a unit graph. Ids are the unit's renumbered word
/// ids; head 0 marks a root edge. attach = created from a pointer,
/// sb = superseded speaker-based edge.
struct GraphEdge {
    int head = 0;
    int dep = 0;
    std::string label;
    EdgeTag tag = EdgeTag::Tree;
    bool operator==(const GraphEdge&) const = default;
};

/// A token of a merged unit: the renumbered row plus where it came from.
struct UnitToken {
    Token token;
    int src_sentence = 0;  // document_position of the source sentence
    TokenId src_id;
};

/// A structurally-autonomous maximal unit: the connected component of the
/// pointer-link graph over sentences, with its merged token sequence.
struct RectionalUnit {
    std::string id;            // member sent_ids joined with '+'
    std::vector<int> members;  // document positions, ascending
    std::vector<UnitToken> tokens;
    std::vector<GraphEdge> edges;

    /// (source document_position, source word id) -> renumbered word id.
    std::map<std::pair<int, int>, int> word_map;

    // Filled by build_intermediate_graph; drives MISC cleanup on projection.
    std::set<int> consumed_coconstruct;  // bearers whose Coconstruct applied
    std::set<int> consumed_backchannel;  // bearers whose Backchannel applied
    std::set<int> resolved_scraps;       // promotion undone
    std::set<int> consumed_head_marks;   // Head= instructions acted upon
};

struct ConvertOptions {
    bool include_backchannels = true;
    SchemeOptions scheme;
};

class ConvertError : public std::runtime_error {
public:
    ConvertError(std::string unit_id, const std::string& what)
        : std::runtime_error(unit_id.empty() ? what : "unit '" + unit_id + "': " + what),
          unit_id_(std::move(unit_id)) {}
    const std::string& unit_id() const { return unit_id_; }

private:
    std::string unit_id_;
};

/// Partitions a document into rectional units: sentences linked
/// (transitively, in either direction) by Coconstruct pointers — and by
/// Backchannel pointers when enabled — form one unit, everything else a
/// singleton. Tokens are concatenated in document order and renumbered;
/// edges stay empty. Requires a document that validates without errors.
std::vector<RectionalUnit> cluster_units(const Document& doc,
                                         const ConvertOptions& opts = {});

/// Populates unit.edges: original within-sentence edges as tree, pointer
/// edges as attach, superseded edges as sb. Resolves promotion (scrap
/// re-attachment and Head=Position lifting) and repair flips.
void build_intermediate_graph(RectionalUnit& unit, const Document& doc,
                              const ConvertOptions& opts = {});

/// Collapses a built unit graph to one UD tree: keeps tree edges, adopts
/// attach edges, drops sb edges; migrates speaker metadata to tokens and
/// strips consumed scheme features. Throws ConvertError when the result
/// is not a single-root connected tree.
Sentence project_dependency_view(const RectionalUnit& unit, const Document& doc,
                                 const ConvertOptions& opts = {});

/// The unit graph rendered as a CoNLL-U sentence: HEAD/DEPREL keep the
/// speaker-based tree, DEPS carries every edge (`h:label`,
/// `h:label/attach`, `h:label/sb`).
Sentence render_intermediate_view(const RectionalUnit& unit, const Document& doc,
                                  const ConvertOptions& opts = {});

struct ConvertResult {
    Document intermediate;
    Document dependency;
};

/// Full pipeline over a validated document. Throws ConvertError on
/// scheme-invalid input, on intermediate-view input (conversion is
/// terminal), and on units that do not project to a tree.
ConvertResult convert_document(const Document& doc, const ConvertOptions& opts = {});

/// True when any DEPS label carries a /attach or /sb suffix.
bool is_intermediate_view(const Document& doc);

}  // namespace coco
