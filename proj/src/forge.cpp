#include "layoutforge/forge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "layoutforge/format.hpp"

namespace layoutforge {

namespace {

const std::map<std::string, std::vector<ParamSchema>, std::less<>>& schemas() {
    static const std::map<std::string, std::vector<ParamSchema>, std::less<>> table{
        {"table",
         {{"top_dx", 0.2, 4.0},
          {"top_dy", 0.2, 3.0},
          {"top_dz", 0.01, 0.3},
          {"leg_count", 1, 6, true},
          {"leg_radius", 0.005, 0.3},
          {"height", 0.2, 1.5}}},
        {"shelf",
         {{"width", 0.2, 3.0},
          {"depth", 0.1, 1.0},
          {"height", 0.3, 3.0},
          {"shelf_count", 1, 12, true},
          {"board_thickness", 0.005, 0.1}}},
        {"sofa",
         {{"seat_width", 0.5, 4.0},
          {"seat_depth", 0.4, 1.5},
          {"seat_height", 0.2, 0.8},
          {"back_height", 0.1, 1.0},
          {"arm_width", 0.05, 0.5}}},
        {"lamp",
         {{"base_radius", 0.05, 0.5},
          {"pole_height", 0.1, 2.5},
          {"shade_radius", 0.05, 0.6},
          {"shade_height", 0.05, 0.8}}},
    };
    return table;
}

constexpr double kLampBaseThickness = 0.02;
constexpr double kLampPoleWidth = 0.02;
constexpr double kSofaBackFraction = 0.15;  // back cushion depth as a share of seat depth
constexpr double kEqualTolerance = 1e-9;

[[noreturn]] void invalid(const std::string& why) { throw std::invalid_argument("invalid program: " + why); }

void check_schema(const Program& program) {
    const auto it = schemas().find(program.category);
    if (it == schemas().end()) {
        invalid("unknown category '" + program.category + "'");
    }
    for (const auto& [name, value] : program.params) {
        const auto s = std::find_if(it->second.begin(), it->second.end(), [&](const ParamSchema& p) { return p.name == name; });
        if (s == it->second.end()) {
            invalid("unknown parameter '" + name + "' for " + program.category);
        }
        if (!std::isfinite(value)) {
            invalid(name + " is not finite");
        }
        if (s->integer && value != std::round(value)) {
            invalid(name + " must be an integer");
        }
        if (value < s->min || value > s->max) {
            invalid(name + " = " + format_double(value) + " outside [" + format_double(s->min) + ", " +
                    format_double(s->max) + "]");
        }
    }
    for (const ParamSchema& s : it->second) {
        if (!program.params.count(s.name)) {
            invalid("missing parameter '" + s.name + "'");
        }
    }
}

void finish(AssetDescriptor& asset) {
    Vec3 lo{INFINITY, INFINITY, INFINITY};
    Vec3 hi{-INFINITY, -INFINITY, -INFINITY};
    for (const AssetPart& p : asset.parts) {
        if (!p.extent.valid()) {
            invalid("part '" + p.name + "' has a non-positive extent");
        }
        lo = {std::min(lo.x, p.offset.x - p.extent.dx / 2), std::min(lo.y, p.offset.y - p.extent.dy / 2),
              std::min(lo.z, p.offset.z - p.extent.dz / 2)};
        hi = {std::max(hi.x, p.offset.x + p.extent.dx / 2), std::max(hi.y, p.offset.y + p.extent.dy / 2),
              std::max(hi.z, p.offset.z + p.extent.dz / 2)};
    }
    asset.extent = Extent{hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
}

AssetDescriptor build_table(const std::map<std::string, double>& p) {
    const double dx = p.at("top_dx"), dy = p.at("top_dy"), dz = p.at("top_dz");
    const double r = p.at("leg_radius"), h = p.at("height");
    const int legs = static_cast<int>(p.at("leg_count"));
    if (h <= dz) {
        invalid("height must exceed top_dz");
    }
    AssetDescriptor a;
    a.category = "table";
    a.parts.push_back({"top", Extent{dx, dy, dz}, Vec3{0, 0, h - dz / 2}});
    const double leg_h = h - dz;
    const double ix = std::max(0.0, dx / 2 - r), iy = std::max(0.0, dy / 2 - r);
    // corners first, then midpoints of the long (x) sides; fewer legs use pedestal/end/tripod layouts
    std::vector<Vec2> spots;
    switch (legs) {
    case 1:
        spots = {{0, 0}};
        break;
    case 2:
        spots = {{-ix, 0}, {ix, 0}};
        break;
    case 3:
        spots = {{-ix, -iy}, {ix, -iy}, {0, iy}};
        break;
    default:
        spots = {{-ix, -iy}, {ix, -iy}, {ix, iy}, {-ix, iy}};
        if (legs >= 5) spots.push_back({0, -iy});
        if (legs >= 6) spots.push_back({0, iy});
    }
    for (std::size_t i = 0; i < spots.size(); ++i) {
        a.parts.push_back({"leg" + std::to_string(i), Extent{2 * r, 2 * r, leg_h}, Vec3{spots[i].x, spots[i].y, leg_h / 2}});
    }
    const double need = legs == 1 ? 2 * r : 4 * r;
    a.flags["legs_fit"] = need <= std::min(dx, dy);
    return a;
}

AssetDescriptor build_shelf(const std::map<std::string, double>& p) {
    const double w = p.at("width"), d = p.at("depth"), h = p.at("height"), t = p.at("board_thickness");
    const int n = static_cast<int>(p.at("shelf_count"));
    if (w <= 2 * t) {
        invalid("width must exceed two board thicknesses");
    }
    if (h <= t) {
        invalid("height must exceed board_thickness");
    }
    AssetDescriptor a;
    a.category = "shelf";
    const double pitch = n > 1 ? (h - t) / (n - 1) : 0.0;
    for (int k = 0; k < n; ++k) {
        a.parts.push_back({"slab" + std::to_string(k), Extent{w - 2 * t, d, t}, Vec3{0, 0, t / 2 + k * pitch}});
    }
    a.parts.push_back({"side_left", Extent{t, d, h}, Vec3{-(w - t) / 2, 0, h / 2}});
    a.parts.push_back({"side_right", Extent{t, d, h}, Vec3{(w - t) / 2, 0, h / 2}});
    a.flags["slabs_separate"] = n == 1 || pitch > t;
    return a;
}

AssetDescriptor build_sofa(const std::map<std::string, double>& p) {
    const double w = p.at("seat_width"), d = p.at("seat_depth"), sh = p.at("seat_height");
    const double bh = p.at("back_height"), arm = p.at("arm_width");
    if (w <= 2 * arm) {
        invalid("seat_width must exceed two arm widths");
    }
    const double back_d = kSofaBackFraction * d;
    AssetDescriptor a;
    a.category = "sofa";
    // front is +y, so the back sits at -y
    a.parts.push_back({"seat", Extent{w - 2 * arm, d - back_d, sh}, Vec3{0, back_d / 2, sh / 2}});
    a.parts.push_back({"back", Extent{w, back_d, sh + bh}, Vec3{0, -(d - back_d) / 2, (sh + bh) / 2}});
    const double arm_h = sh + bh / 2;
    a.parts.push_back({"arm_left", Extent{arm, d - back_d, arm_h}, Vec3{-(w - arm) / 2, back_d / 2, arm_h / 2}});
    a.parts.push_back({"arm_right", Extent{arm, d - back_d, arm_h}, Vec3{(w - arm) / 2, back_d / 2, arm_h / 2}});
    a.flags["arms_below_back"] = arm_h < sh + bh;
    return a;
}

AssetDescriptor build_lamp(const std::map<std::string, double>& p) {
    const double br = p.at("base_radius"), ph = p.at("pole_height");
    const double sr = p.at("shade_radius"), sh = p.at("shade_height");
    if (sh >= ph) {
        invalid("shade_height must be below pole_height");
    }
    AssetDescriptor a;
    a.category = "lamp";
    const double b = kLampBaseThickness;
    a.parts.push_back({"base", Extent{2 * br, 2 * br, b}, Vec3{0, 0, b / 2}});
    a.parts.push_back({"pole", Extent{kLampPoleWidth, kLampPoleWidth, ph}, Vec3{0, 0, b + ph / 2}});
    a.parts.push_back({"shade", Extent{2 * sr, 2 * sr, sh}, Vec3{0, 0, b + ph - sh / 2}});
    a.flags["stable"] = br >= 0.5 * sr;
    return a;
}

struct Driver {
    std::string param;
    double scale = 1.0;
    double offset = 0.0;
};

// Parameter that moves a derived field linearly: field = scale * param + offset.
std::optional<Driver> driver_for(const Program& program, const std::string& field) {
    const auto& p = program.params;
    const auto get = [&](const char* name) { return p.count(name) ? p.at(name) : 0.0; };
    if (program.category == "table") {
        if (field == "extent.dx") return Driver{"top_dx"};
        if (field == "extent.dy") return Driver{"top_dy"};
        if (field == "extent.dz") return Driver{"height"};
        if (field == "part_count") return Driver{"leg_count", 1.0, 1.0};
    } else if (program.category == "shelf") {
        if (field == "extent.dx") return Driver{"width"};
        if (field == "extent.dy") return Driver{"depth"};
        if (field == "extent.dz") return Driver{"height"};
        if (field == "part_count") return Driver{"shelf_count", 1.0, 2.0};
    } else if (program.category == "sofa") {
        if (field == "extent.dx") return Driver{"seat_width"};
        if (field == "extent.dy") return Driver{"seat_depth"};
        if (field == "extent.dz") return Driver{"back_height", 1.0, get("seat_height")};
    } else if (program.category == "lamp") {
        if (field == "extent.dz") return Driver{"pole_height", 1.0, kLampBaseThickness};
        if (field == "extent.dx" || field == "extent.dy") {
            return get("shade_radius") >= get("base_radius") ? Driver{"shade_radius", 2.0} : Driver{"base_radius", 2.0};
        }
    }
    if (p.count(field)) {
        return Driver{field};
    }
    return std::nullopt;
}

std::optional<double> observe(const std::string& field, const AssetDescriptor& asset, const Program& program) {
    if (field == "extent.dx") return asset.extent.dx;
    if (field == "extent.dy") return asset.extent.dy;
    if (field == "extent.dz") return asset.extent.dz;
    if (field == "part_count") return static_cast<double>(asset.parts.size());
    if (field.rfind("flag.", 0) == 0) {
        const auto it = asset.flags.find(field.substr(5));
        if (it == asset.flags.end()) return std::nullopt;
        return it->second ? 1.0 : 0.0;
    }
    const auto it = program.params.find(field);
    if (it == program.params.end()) return std::nullopt;
    return it->second;
}

}  // namespace

const std::vector<ParamSchema>& program_schema(std::string_view category) {
    const auto it = schemas().find(category);
    if (it == schemas().end()) {
        throw std::invalid_argument("unknown asset category: " + std::string(category));
    }
    return it->second;
}

const std::vector<std::string>& grammar_categories() {
    static const std::vector<std::string> names{"table", "shelf", "sofa", "lamp"};
    return names;
}

AssetDescriptor toy_execute(const Program& program) {
    check_schema(program);
    AssetDescriptor a;
    if (program.category == "table") {
        a = build_table(program.params);
    } else if (program.category == "shelf") {
        a = build_shelf(program.params);
    } else if (program.category == "sofa") {
        a = build_sofa(program.params);
    } else {
        a = build_lamp(program.params);
    }
    finish(a);
    return a;
}

std::string Predicate::describe() const {
    if (op == PredicateOp::Equals) {
        return field + " == " + (field == "category" ? text : format_double(value));
    }
    return field + " in [" + format_double(lo) + ", " + format_double(hi) + "]";
}

std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::Increase:
        return "increase";
    case Direction::Decrease:
        return "decrease";
    case Direction::Set:
        return "set";
    }
    return "set";
}

CritiqueReport rule_critic(const Task& task, const AssetDescriptor& asset, const Program& program) {
    CritiqueReport report;
    for (const Predicate& pred : task.spec) {
        if (pred.field == "category") {
            if (asset.category != pred.text) {
                report.failures.push_back({pred.describe(), asset.category});
                report.suggestions.push_back({"category", Direction::Set, 0.0, pred.text});
            }
            continue;
        }
        const std::optional<double> seen = observe(pred.field, asset, program);
        if (!seen) {
            report.failures.push_back({pred.describe(), "missing"});
            continue;
        }
        const std::optional<Driver> driver = driver_for(program, pred.field);
        const auto suggest = [&](Direction dir, double field_target) {
            if (!driver) return;
            report.suggestions.push_back({driver->param, dir, (field_target - driver->offset) / driver->scale, ""});
        };
        if (pred.op == PredicateOp::Equals) {
            if (std::abs(*seen - pred.value) > kEqualTolerance) {
                report.failures.push_back({pred.describe(), format_double(*seen)});
                suggest(Direction::Set, pred.value);
            }
        } else if (*seen < pred.lo || *seen > pred.hi) {
            report.failures.push_back({pred.describe(), format_double(*seen)});
            const double target = std::isfinite(pred.lo) && std::isfinite(pred.hi) ? (pred.lo + pred.hi) / 2
                                  : std::isfinite(pred.lo)                        ? pred.lo
                                                                                  : pred.hi;
            suggest(*seen < pred.lo ? Direction::Increase : Direction::Decrease, target);
        }
    }
    report.accepted = report.failures.empty();
    return report;
}

// ---------------------------------------------------------------------------

std::vector<std::string> word_tokens(std::string_view text) {
    std::set<std::string> unique;
    std::string current;
    for (const char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            unique.insert(current);
            current.clear();
        }
    }
    if (!current.empty()) {
        unique.insert(current);
    }
    return {unique.begin(), unique.end()};
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const double inter = static_cast<double>(common.size());
    return inter / (static_cast<double>(a.size() + b.size()) - inter);
}

void Manual::add(ManualRecord record) {
    const std::size_t idx = records_.size();
    tokens_.push_back(word_tokens(record.task_text));
    for (const std::string& t : tokens_.back()) {
        index_[t].push_back(idx);
    }
    records_.push_back(std::move(record));
}

Manual::CommitResult Manual::commit(const std::string& task_text, const Program& program, int attempts) {
    for (const ManualRecord& r : records_) {
        if (r.task_text == task_text && r.program == program) {
            return {false, r.sequence};
        }
    }
    const std::uint64_t seq = records_.empty() ? 1 : records_.back().sequence + 1;
    add(ManualRecord{task_text, program, attempts, seq});
    return {true, seq};
}

std::vector<ScoredRecord> Manual::lookup(std::string_view query, std::size_t top_k, double min_score) const {
    const std::vector<std::string> q = word_tokens(query);
    std::set<std::size_t> candidates;
    if (min_score > 0.0) {
        for (const std::string& t : q) {
            const auto it = index_.find(t);
            if (it != index_.end()) candidates.insert(it->second.begin(), it->second.end());
        }
    } else {
        for (std::size_t i = 0; i < records_.size(); ++i) candidates.insert(i);
    }
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i : candidates) {
        const double s = jaccard(q, tokens_[i]);
        if (s >= min_score) {
            scored.emplace_back(s, i);
        }
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<ScoredRecord> out;
    for (std::size_t k = 0; k < scored.size() && k < top_k; ++k) {
        out.push_back({&records_[scored[k].second], scored[k].first});
    }
    return out;
}

namespace {

constexpr std::string_view kManualHeader = "# layoutforge-manual v1";

std::string escape(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view s, std::size_t line) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) {
            throw std::invalid_argument("manual line " + std::to_string(line) + ": dangling escape");
        }
        switch (s[i]) {
        case '\\': out += '\\'; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: throw std::invalid_argument("manual line " + std::to_string(line) + ": bad escape");
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw std::invalid_argument("manual line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

void Manual::save(std::ostream& out) const {
    out << kManualHeader << '\n';
    for (const ManualRecord& r : records_) {
        out << escape(r.task_text) << '\t' << escape(r.program.category) << '\t';
        bool first = true;
        for (const auto& [name, value] : r.program.params) {
            out << (first ? "" : ",") << name << '=' << format_double(value);
            first = false;
        }
        out << '\t' << r.attempts << '\t' << r.sequence << '\n';
    }
}

Manual Manual::load(std::istream& in) {
    Manual m;
    std::string line;
    std::size_t number = 0;
    if (!std::getline(in, line) || line != kManualHeader) {
        throw std::invalid_argument("manual line 1: expected header '" + std::string(kManualHeader) + "'");
    }
    ++number;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 5) {
            throw std::invalid_argument("manual line " + std::to_string(number) + ": expected 5 tab-separated fields");
        }
        ManualRecord r;
        r.task_text = unescape(fields[0], number);
        r.program.category = unescape(fields[1], number);
        if (!fields[2].empty()) {
            for (const std::string& kv : split(fields[2], ',')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw std::invalid_argument("manual line " + std::to_string(number) + ": bad parameter '" + kv + "'");
                }
                r.program.params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), number);
            }
        }
        r.attempts = static_cast<int>(parse_number(fields[3], number));
        r.sequence = static_cast<std::uint64_t>(parse_number(fields[4], number));
        if (!m.records_.empty() && r.sequence <= m.records_.back().sequence) {
            throw std::invalid_argument("manual line " + std::to_string(number) + ": sequence numbers must increase");
        }
        for (const ManualRecord& existing : m.records_) {
            if (existing.task_text == r.task_text && existing.program == r.program) {
                throw std::invalid_argument("manual line " + std::to_string(number) + ": duplicate record");
            }
        }
        m.add(std::move(r));
    }
    return m;
}

// ---------------------------------------------------------------------------

LoopOutcome run_loop(const Task& task, const Generator& generator, const Critic& critic, int max_iters, Manual& manual) {
    if (max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    std::vector<Program> attempts;
    std::vector<CritiqueReport> history;
    const std::vector<ScoredRecord> references = manual.lookup(task.text);
    for (int i = 1; i <= max_iters; ++i) {
        Program program;
        try {
            program = generator(GeneratorContext{task, attempts, history, references});
        } catch (const std::exception& e) {
            return LoopFailure{i - 1, history.empty() ? std::nullopt : std::optional(history.back()),
                               std::string("generator failed: ") + e.what()};
        }
        CritiqueReport report;
        try {
            const AssetDescriptor asset = toy_execute(program);
            report = critic(task, asset, program);
        } catch (const std::invalid_argument& e) {
            // a program that does not execute is a rejected attempt
            report.accepted = false;
            report.failures.push_back({"program executes", e.what()});
        } catch (const std::exception& e) {
            return LoopFailure{i, history.empty() ? std::nullopt : std::optional(history.back()),
                               std::string("critic failed: ") + e.what()};
        }
        attempts.push_back(program);
        history.push_back(report);
        if (report.accepted) {
            const Manual::CommitResult c = manual.commit(task.text, program, i);
            return LoopSuccess{ManualRecord{task.text, program, i, c.sequence}, c.added};
        }
    }
    return LoopFailure{max_iters, history.back(), "no accepted program within " + std::to_string(max_iters) + " attempts"};
}

Generator enumerating_generator(Program base, std::string parameter, std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("enumerating generator needs values");
    }
    return [base = std::move(base), parameter = std::move(parameter), values = std::move(values)](const GeneratorContext& ctx) {
        Program p = base;
        p.params[parameter] = values[ctx.attempts.size() % values.size()];
        return p;
    };
}

namespace {

Program default_program(const std::string& category) {
    Program p{category, {}};
    for (const ParamSchema& s : program_schema(category)) {
        const double mid = (s.min + s.max) / 2;
        p.params[s.name] = s.integer ? std::round(mid) : mid;
    }
    return p;
}

bool is_integer_param(const Program& p, const std::string& name) {
    const auto it = schemas().find(p.category);
    if (it == schemas().end()) return false;
    for (const ParamSchema& s : it->second) {
        if (s.name == name) return s.integer;
    }
    return false;
}

}  // namespace

Generator suggestion_generator(Program start) {
    return [start = std::move(start)](const GeneratorContext& ctx) {
        if (ctx.attempts.empty()) {
            return ctx.references.empty() ? start : ctx.references.front().record->program;
        }
        Program p = ctx.attempts.back();
        for (const Suggestion& s : ctx.history.back().suggestions) {
            if (s.parameter == "category") {
                if (p.category != s.text) p = default_program(s.text);
                continue;
            }
            const auto it = p.params.find(s.parameter);
            if (it == p.params.end()) {
                continue;
            }
            double next = s.direction == Direction::Set ? s.target : it->second + (s.target - it->second) / 2;
            if (is_integer_param(p, s.parameter)) {
                const double rounded = std::round(next);
                // halving can stall on integers; always make at least one step
                next = rounded != it->second ? rounded : it->second + (s.target > it->second ? 1.0 : -1.0);
            }
            it->second = next;
        }
        return p;
    };
}

}  // namespace layoutforge
