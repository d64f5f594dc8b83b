#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/corpus.hpp"

namespace cqa {

/// Splitter placed after a query segment. `none` is used by the flat format.
enum class Marker { none, S, D, T };

std::string_view marker_name(Marker m);          // "", "S", "D", "T"
std::string_view marker_token(Marker m);         // "", "[S]", "[D]", "[T]"
std::optional<Marker> parse_marker_name(std::string_view name);

enum class InputFormat { cat, fs };

std::string_view to_string(InputFormat f);
InputFormat parse_input_format(std::string_view name);

struct QuerySegment {
    std::string text;
    Marker marker = Marker::none;

    bool operator==(const QuerySegment&) const = default;
};

/// Query side split into marked segments plus the answer text, before the
/// scorer adds its own start and separator tokens.
struct StructuredInput {
    std::vector<QuerySegment> query_segments;
    std::string answer_text;

    bool operator==(const StructuredInput&) const = default;
};

enum class Segment { subject, description, tags };

/// Segments to leave out of the structured format together with their
/// markers. Dropping all three is rejected.
class AblationSpec {
public:
    AblationSpec() = default;
    AblationSpec(std::initializer_list<Segment> drop);

    bool drops(Segment s) const { return drop_[static_cast<int>(s)]; }
    bool empty() const { return !drop_[0] && !drop_[1] && !drop_[2]; }

    /// Comma-separated subset of "S,D,T"; empty string means no ablation.
    static AblationSpec parse(std::string_view spec);
    /// Inverse of parse, in S,D,T order.
    std::string to_string() const;

    bool operator==(const AblationSpec&) const = default;

private:
    bool drop_[3] = {false, false, false};
};

/// Tags joined by "; ".
std::string render_tags(const std::vector<std::string>& tags);

/// Rejects questions whose fields contain a literal marker string, which
/// would make the rendered input ambiguous. Throws DataError.
void check_marker_free(const Question& q);

/// (subject, S), (description, D), (tags, T) minus the dropped segments.
/// Empty segments keep their markers.
StructuredInput build_fs_input(const Question& question, std::string answer_text,
                               const AblationSpec& ablation = {});

/// One unmarked segment: subject, description and (optionally) rendered
/// tags joined by single spaces, skipping empty parts.
StructuredInput build_cat_input(const Question& question, std::string answer_text, bool include_tags = true);

/// Query side as the scorer sees it, e.g. "subj [S] desc [D] a; b [T]".
/// Segments and markers are joined by single spaces; empty segments
/// contribute no text.
std::string render_query(const StructuredInput& input);

}  // namespace cqa
