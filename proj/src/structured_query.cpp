#include "cqa/structured_query.hpp"

#include <stdexcept>

#include "cqa/error.hpp"

namespace cqa {

std::string_view marker_name(Marker m) {
    switch (m) {
        case Marker::S: return "S";
        case Marker::D: return "D";
        case Marker::T: return "T";
        case Marker::none: break;
    }
    return "";
}

std::string_view marker_token(Marker m) {
    switch (m) {
        case Marker::S: return "[S]";
        case Marker::D: return "[D]";
        case Marker::T: return "[T]";
        case Marker::none: break;
    }
    return "";
}

std::optional<Marker> parse_marker_name(std::string_view name) {
    if (name == "S") return Marker::S;
    if (name == "D") return Marker::D;
    if (name == "T") return Marker::T;
    if (name.empty() || name == "none") return Marker::none;
    return std::nullopt;
}

std::string_view to_string(InputFormat f) { return f == InputFormat::fs ? "fs" : "cat"; }

InputFormat parse_input_format(std::string_view name) {
    if (name == "fs") return InputFormat::fs;
    if (name == "cat") return InputFormat::cat;
    throw std::invalid_argument("unknown input format '" + std::string(name) + "' (expected fs or cat)");
}

AblationSpec::AblationSpec(std::initializer_list<Segment> drop) {
    for (auto s : drop) drop_[static_cast<int>(s)] = true;
    if (drop_[0] && drop_[1] && drop_[2]) throw std::invalid_argument("ablation cannot drop every segment");
}

AblationSpec AblationSpec::parse(std::string_view spec) {
    AblationSpec out;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        const auto comma = std::min(spec.find(',', pos), spec.size());
        const auto part = spec.substr(pos, comma - pos);
        if (part == "S") {
            out.drop_[0] = true;
        } else if (part == "D") {
            out.drop_[1] = true;
        } else if (part == "T") {
            out.drop_[2] = true;
        } else {
            throw std::invalid_argument("unknown segment '" + std::string(part) + "' (expected S, D or T)");
        }
        pos = comma + 1;
    }
    if (out.drop_[0] && out.drop_[1] && out.drop_[2]) {
        throw std::invalid_argument("ablation cannot drop every segment");
    }
    return out;
}

std::string AblationSpec::to_string() const {
    std::string out;
    const char* names[] = {"S", "D", "T"};
    for (int i = 0; i < 3; ++i) {
        if (!drop_[i]) continue;
        if (!out.empty()) out += ',';
        out += names[i];
    }
    return out;
}

std::string render_tags(const std::vector<std::string>& tags) {
    std::string out;
    for (const auto& t : tags) {
        if (!out.empty()) out += "; ";
        out += t;
    }
    return out;
}

void check_marker_free(const Question& q) {
    auto check = [&](const std::string& text, const char* field) {
        for (auto m : {Marker::S, Marker::D, Marker::T}) {
            if (text.find(marker_token(m)) != std::string::npos) {
                throw DataError("question " + q.id + ": " + field + " contains the marker " +
                                std::string(marker_token(m)));
            }
        }
    };
    check(q.subject, "subject");
    check(q.description, "description");
    for (const auto& t : q.tags) check(t, "tags");
}

StructuredInput build_fs_input(const Question& question, std::string answer_text, const AblationSpec& ablation) {
    check_marker_free(question);
    StructuredInput in;
    if (!ablation.drops(Segment::subject)) in.query_segments.push_back({question.subject, Marker::S});
    if (!ablation.drops(Segment::description)) in.query_segments.push_back({question.description, Marker::D});
    if (!ablation.drops(Segment::tags)) in.query_segments.push_back({render_tags(question.tags), Marker::T});
    in.answer_text = std::move(answer_text);
    return in;
}

StructuredInput build_cat_input(const Question& question, std::string answer_text, bool include_tags) {
    check_marker_free(question);
    std::string text;
    auto add = [&](const std::string& part) {
        if (part.empty()) return;
        if (!text.empty()) text += ' ';
        text += part;
    };
    add(question.subject);
    add(question.description);
    if (include_tags) add(render_tags(question.tags));
    StructuredInput in;
    in.query_segments.push_back({std::move(text), Marker::none});
    in.answer_text = std::move(answer_text);
    return in;
}

std::string render_query(const StructuredInput& input) {
    std::string out;
    auto add = [&](std::string_view part) {
        if (part.empty()) return;
        if (!out.empty()) out += ' ';
        out += part;
    };
    for (const auto& seg : input.query_segments) {
        add(seg.text);
        add(marker_token(seg.marker));
    }
    return out;
}

}  // namespace cqa
