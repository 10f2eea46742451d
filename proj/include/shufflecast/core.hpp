#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shufflecast {

/// Data point identifier, dense in [0, N). Stable across epochs.
using PointId = std::uint32_t;

/// One point payload, exactly block_size bytes.
using Block = std::vector<std::uint8_t>;

/// A worker-side cache: point id -> payload.
using BlockMap = std::map<PointId, Block>;

// ============================================================================
// Errors
// ============================================================================

/// Malformed user input: bad flags, unparsable files, invalid partitions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A worker could not reconstruct its batch from a broadcast plan.
/// Carries the point ids that stayed unresolved at the decode fixpoint.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::vector<PointId> missing);
    const std::vector<PointId>& missing() const { return missing_; }

private:
    std::vector<PointId> missing_;
};

// ============================================================================
// Check reports
// ============================================================================

struct CheckItem {
    std::string name;
    bool ok = false;
    std::string detail;  // filled on failure
};

/// Itemized pass/fail list used by structural validators. Soft by design:
/// callers decide whether a failure aborts or is merely reported.
struct CheckReport {
    std::vector<CheckItem> items;

    bool all_ok() const;
    void add(std::string name, bool ok, std::string detail = {});
    const CheckItem* find(const std::string& name) const;
    std::string summary() const;
};

// ============================================================================
// Dataset
// ============================================================================

/// N fixed-size opaque payload blocks addressed by point id.
class Dataset {
public:
    Dataset(std::size_t n_points, std::size_t block_size, std::vector<std::uint8_t> bytes);

    std::size_t n_points() const { return n_points_; }
    std::size_t block_size() const { return block_size_; }
    std::span<const std::uint8_t> block(PointId id) const;

private:
    std::size_t n_points_;
    std::size_t block_size_;
    std::vector<std::uint8_t> bytes_;  // point-id major, n_points * block_size
};

/// Deterministic pseudorandom payloads: identical (n, d, seed) give
/// byte-identical datasets on every platform.
Dataset make_dataset(std::size_t n_points, std::size_t block_size_bytes, std::uint64_t seed);

// ============================================================================
// Assignments and shuffles
// ============================================================================

/// One epoch's partition of the N points across K workers.
/// Batches are kept sorted ascending. Worker indices are 0-based internally;
/// all user-facing text is 1-based (w1..wK).
struct Assignment {
    int epoch = 0;
    std::vector<std::vector<PointId>> batches;

    int workers() const { return static_cast<int>(batches.size()); }
    std::size_t total_points() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Checks disjointness, coverage of [0, N), and equal batch sizes N/K.
/// N not divisible by K surfaces as a batch-size failure.
CheckReport validate_assignment(const Assignment& a, std::size_t n_points);

/// Consecutive-epoch pair (the shuffle from prev to next).
struct ShufflePair {
    Assignment prev;
    Assignment next;
};

/// Throws InputError unless both assignments are valid partitions of the same
/// N points, worker counts match, and next.epoch == prev.epoch + 1.
void validate_pair(const ShufflePair& pair);

// Assignment text format: one line per worker, "w<index>: <id>,<id>,...",
// 1-based worker indices, ids in decimal sorted ascending. Blank lines and
// '#' comments are ignored. read accepts unsorted ids and sorts them.
Assignment read_assignment(std::istream& in, int epoch = 0);
Assignment read_assignment_file(const std::string& path, int epoch = 0);
void write_assignment(std::ostream& out, const Assignment& a);

// ============================================================================
// Coded symbols
// ============================================================================

enum class SymbolKind {
    Order2,  // pairwise cancellation: both holders decode symmetrically
    Chain    // leftover combining: decoded directly by served_worker
};

/// XOR of two distinct point payloads. Components are stored ascending.
struct CodedSymbol {
    SymbolKind kind = SymbolKind::Order2;
    std::array<PointId, 2> components{};
    Block payload;
    std::optional<int> served_worker;  // Chain only
};

CodedSymbol make_symbol(SymbolKind kind, PointId a, PointId b, const Dataset& data,
                        std::optional<int> served_worker = std::nullopt);

/// The full broadcast for one shuffle: order-2 symbols, then leftover chains
/// built around one ignored worker. Unchanged points never appear.
struct TransmissionPlan {
    std::vector<CodedSymbol> phase1;
    std::vector<CodedSymbol> phase2;
    int ignored_worker = 0;

    std::size_t rate_points() const { return phase1.size() + phase2.size(); }
};

/// Debug dump: "P1 <id>^<id>" / "P2@w<served> <id>^<id>" lines followed by
/// "IGNORED w<k>". Payload bytes are omitted (reconstructible from the
/// dataset seed).
void write_plan(std::ostream& out, const TransmissionPlan& plan);

// ============================================================================
// Sorted-set and XOR helpers shared by analysis and codec
// ============================================================================

std::vector<PointId> sorted_intersection(const std::vector<PointId>& a,
                                         const std::vector<PointId>& b);
std::vector<PointId> sorted_difference(const std::vector<PointId>& a,
                                       const std::vector<PointId>& b);

/// dst ^= src, sizes must match.
void xor_into(Block& dst, std::span<const std::uint8_t> src);

}  // namespace shufflecast
