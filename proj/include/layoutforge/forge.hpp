#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "layoutforge/scene.hpp"

namespace layoutforge {

// ---------------------------------------------------------------------------
// Toy parametric asset grammar

struct Program {
    std::string category;
    std::map<std::string, double> params;

    friend bool operator==(const Program&, const Program&) = default;
    friend auto operator<=>(const Program&, const Program&) = default;
};

struct ParamSchema {
    std::string name;
    double min;
    double max;
    bool integer = false;
};

/// Parameter schema of a grammar category; throws std::invalid_argument for
/// unknown categories.
const std::vector<ParamSchema>& program_schema(std::string_view category);
const std::vector<std::string>& grammar_categories();

struct AssetPart {
    std::string name;
    Extent extent;
    Vec3 offset;  // part center relative to the asset's floor center
};

struct AssetDescriptor {
    std::string category;
    Extent extent;  // axis-aligned bound of all parts
    std::vector<AssetPart> parts;
    std::map<std::string, bool> flags;
};

/// Derives parts and overall extent. Throws std::invalid_argument("invalid
/// program: ...") on schema violations.
AssetDescriptor toy_execute(const Program& program);

// ---------------------------------------------------------------------------
// Tasks and the rule critic

enum class PredicateOp { Equals, InRange };

/// A requirement on one field. Fields are "category", a program parameter,
/// "extent.dx" / "extent.dy" / "extent.dz", "part_count" or "flag.<name>".
struct Predicate {
    std::string field;
    PredicateOp op = PredicateOp::Equals;
    double value = 0.0;
    std::string text;  // Equals on "category"
    double lo = 0.0;
    double hi = 0.0;

    std::string describe() const;
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Task {
    std::string text;
    std::vector<Predicate> spec;

    friend bool operator==(const Task&, const Task&) = default;
};

enum class Direction { Increase, Decrease, Set };
std::string_view to_string(Direction d);

struct Suggestion {
    std::string parameter;
    Direction direction = Direction::Set;
    double target = 0.0;  // range midpoint (or the finite bound), or the required value
    std::string text;     // required category for Set on "category"

    friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct PredicateFailure {
    std::string predicate;
    std::string observed;

    friend bool operator==(const PredicateFailure&, const PredicateFailure&) = default;
};

struct CritiqueReport {
    bool accepted = false;
    std::vector<PredicateFailure> failures;
    std::vector<Suggestion> suggestions;

    friend bool operator==(const CritiqueReport&, const CritiqueReport&) = default;
};

CritiqueReport rule_critic(const Task& task, const AssetDescriptor& asset, const Program& program);

// ---------------------------------------------------------------------------
// Manual

struct ManualRecord {
    std::string task_text;
    Program program;
    int attempts = 0;
    std::uint64_t sequence = 0;  // commit order, serves as the timestamp

    friend bool operator==(const ManualRecord&, const ManualRecord&) = default;
};

struct ScoredRecord {
    const ManualRecord* record;
    double score;
};

std::vector<std::string> word_tokens(std::string_view text);
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Append-only store of accepted (task, program) pairs with a token index.
class Manual {
public:
    struct CommitResult {
        bool added;
        std::uint64_t sequence;  // of the new or already present record
    };

    std::size_t size() const { return records_.size(); }
    const std::vector<ManualRecord>& records() const { return records_; }

    /// Duplicate (task text, program) pairs are a no-op with added = false.
    CommitResult commit(const std::string& task_text, const Program& program, int attempts);

    /// Records scoring at least `min_score`, best first, earlier commits first on ties.
    std::vector<ScoredRecord> lookup(std::string_view query, std::size_t top_k = 3, double min_score = 0.2) const;

    void save(std::ostream& out) const;
    /// Throws std::invalid_argument with the offending line number.
    static Manual load(std::istream& in);

    friend bool operator==(const Manual& a, const Manual& b) { return a.records_ == b.records_; }

private:
    void add(ManualRecord record);

    std::vector<ManualRecord> records_;
    std::vector<std::vector<std::string>> tokens_;
    std::map<std::string, std::vector<std::size_t>> index_;
};

// ---------------------------------------------------------------------------
// Verification loop

struct GeneratorContext {
    const Task& task;
    const std::vector<Program>& attempts;        // programs proposed so far
    const std::vector<CritiqueReport>& history;  // one report per attempt
    const std::vector<ScoredRecord>& references; // manual lookup for the task text
};

using Generator = std::function<Program(const GeneratorContext&)>;
using Critic = std::function<CritiqueReport(const Task&, const AssetDescriptor&, const Program&)>;

struct LoopSuccess {
    ManualRecord record;
    bool newly_committed = true;
};

struct LoopFailure {
    int attempts = 0;
    std::optional<CritiqueReport> last_report;
    std::string diagnostic;
};

using LoopOutcome = std::variant<LoopSuccess, LoopFailure>;

/// Generator and critic faults end the loop as LoopFailure with a diagnostic;
/// programs that do not execute count as rejected attempts.
LoopOutcome run_loop(const Task& task, const Generator& generator, const Critic& critic, int max_iters, Manual& manual);

/// Cycles through `values` for one parameter of `base`.
Generator enumerating_generator(Program base, std::string parameter, std::vector<double> values);

/// Starts from the best manual reference (or `start` when there is none) and
/// then moves every flagged numeric parameter halfway towards the suggested
/// target; "set" suggestions are applied directly.
Generator suggestion_generator(Program start);

}  // namespace layoutforge
