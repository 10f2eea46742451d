#include "shufflecast/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace shufflecast {

DecodeError::DecodeError(const std::string& what, std::vector<PointId> missing)
    : std::runtime_error(what), missing_(std::move(missing)) {}

// ----------------------------------------------------------------------------
// CheckReport
// ----------------------------------------------------------------------------

bool CheckReport::all_ok() const {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& it) { return it.ok; });
}

void CheckReport::add(std::string name, bool ok, std::string detail) {
    items.push_back({std::move(name), ok, std::move(detail)});
}

const CheckItem* CheckReport::find(const std::string& name) const {
    for (const auto& it : items) {
        if (it.name == name) return &it;
    }
    return nullptr;
}

std::string CheckReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) os << "; ";
        os << items[i].name << ": " << (items[i].ok ? "ok" : "FAIL");
        if (!items[i].ok && !items[i].detail.empty()) os << " (" << items[i].detail << ")";
    }
    return os.str();
}

// ----------------------------------------------------------------------------
// Dataset
// ----------------------------------------------------------------------------

Dataset::Dataset(std::size_t n_points, std::size_t block_size, std::vector<std::uint8_t> bytes)
    : n_points_(n_points), block_size_(block_size), bytes_(std::move(bytes)) {
    if (n_points_ == 0) throw InputError("dataset needs at least one point");
    if (block_size_ == 0) throw InputError("dataset block size must be positive");
    if (bytes_.size() != n_points_ * block_size_)
        throw InputError("dataset byte buffer does not match n_points * block_size");
}

std::span<const std::uint8_t> Dataset::block(PointId id) const {
    if (id >= n_points_) throw InputError("point id " + std::to_string(id) + " out of range");
    return {bytes_.data() + static_cast<std::size_t>(id) * block_size_, block_size_};
}

Dataset make_dataset(std::size_t n_points, std::size_t block_size_bytes, std::uint64_t seed) {
    if (n_points == 0) throw InputError("dataset needs at least one point");
    if (block_size_bytes == 0) throw InputError("dataset block size must be positive");

    // mt19937_64 output is fully specified, so the byte stream is portable.
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(n_points * block_size_bytes);
    std::uint64_t word = 0;
    int avail = 0;
    for (std::size_t i = 0; i < n_points * block_size_bytes; ++i) {
        if (avail == 0) {
            word = rng();
            avail = 8;
        }
        bytes.push_back(static_cast<std::uint8_t>(word & 0xff));
        word >>= 8;
        --avail;
    }
    return Dataset(n_points, block_size_bytes, std::move(bytes));
}

// ----------------------------------------------------------------------------
// Assignments
// ----------------------------------------------------------------------------

std::size_t Assignment::total_points() const {
    std::size_t n = 0;
    for (const auto& b : batches) n += b.size();
    return n;
}

CheckReport validate_assignment(const Assignment& a, std::size_t n_points) {
    CheckReport report;
    const int k = a.workers();

    {
        bool sizes_ok = k > 0 && n_points > 0 && n_points % static_cast<std::size_t>(k) == 0;
        std::string detail;
        if (!sizes_ok) {
            detail = "N=" + std::to_string(n_points) + " is not divisible into K=" +
                     std::to_string(k) + " equal batches";
        } else {
            const std::size_t want = n_points / static_cast<std::size_t>(k);
            for (int i = 0; i < k && sizes_ok; ++i) {
                if (a.batches[i].size() != want) {
                    sizes_ok = false;
                    detail = "batch w" + std::to_string(i + 1) + " has " +
                             std::to_string(a.batches[i].size()) + " points, expected " +
                             std::to_string(want);
                }
            }
        }
        report.add("batch-sizes", sizes_ok, detail);
    }

    {
        // seen[id] = 1-based worker that first claimed the id
        std::vector<int> seen(n_points, 0);
        bool disjoint = true;
        bool in_range = true;
        std::string disjoint_detail, range_detail;
        for (int i = 0; i < k; ++i) {
            for (PointId id : a.batches[i]) {
                if (id >= n_points) {
                    if (in_range) {
                        range_detail = "point id " + std::to_string(id) + " at w" +
                                       std::to_string(i + 1) + " is outside [0, " +
                                       std::to_string(n_points) + ")";
                    }
                    in_range = false;
                    continue;
                }
                if (seen[id] != 0) {
                    if (disjoint) {
                        disjoint_detail = "point id " + std::to_string(id) + " appears at w" +
                                          std::to_string(seen[id]) + " and w" +
                                          std::to_string(i + 1);
                    }
                    disjoint = false;
                } else {
                    seen[id] = i + 1;
                }
            }
        }
        report.add("disjoint", disjoint, disjoint_detail);

        bool covered = in_range;
        std::string cover_detail = range_detail;
        if (covered) {
            for (std::size_t id = 0; id < n_points; ++id) {
                if (seen[id] == 0) {
                    covered = false;
                    cover_detail = "point id " + std::to_string(id) + " is missing";
                    break;
                }
            }
        }
        report.add("coverage", covered, cover_detail);
    }

    return report;
}

void validate_pair(const ShufflePair& pair) {
    if (pair.prev.workers() != pair.next.workers()) {
        throw InputError("worker counts differ between epochs: " +
                         std::to_string(pair.prev.workers()) + " vs " +
                         std::to_string(pair.next.workers()));
    }
    if (pair.prev.total_points() != pair.next.total_points()) {
        throw InputError("point counts differ between epochs: " +
                         std::to_string(pair.prev.total_points()) + " vs " +
                         std::to_string(pair.next.total_points()));
    }
    if (pair.next.epoch != pair.prev.epoch + 1) {
        throw InputError("epochs are not consecutive: " + std::to_string(pair.prev.epoch) +
                         " -> " + std::to_string(pair.next.epoch));
    }
    const std::size_t n = pair.prev.total_points();
    for (const Assignment* a : {&pair.prev, &pair.next}) {
        CheckReport r = validate_assignment(*a, n);
        if (!r.all_ok()) {
            throw InputError("invalid assignment at epoch " + std::to_string(a->epoch) + ": " +
                             r.summary());
        }
    }
}

// ----------------------------------------------------------------------------
// Assignment text format
// ----------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void parse_fail(int line_no, const std::string& msg) {
    throw InputError("line " + std::to_string(line_no) + ": " + msg);
}

long parse_int(std::string_view tok, int line_no, const char* what) {
    tok = trim(tok);
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
        parse_fail(line_no, std::string("cannot parse ") + what + " '" + std::string(tok) + "'");
    }
    return value;
}

}  // namespace

Assignment read_assignment(std::istream& in, int epoch) {
    std::map<int, std::vector<PointId>> batches;  // 1-based worker index -> ids
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (sv.front() != 'w') parse_fail(line_no, "expected 'w<index>: ...'");
        sv.remove_prefix(1);
        const auto colon = sv.find(':');
        if (colon == std::string_view::npos) parse_fail(line_no, "missing ':' after worker index");
        const long widx = parse_int(sv.substr(0, colon), line_no, "worker index");
        if (widx < 1) parse_fail(line_no, "worker index must be >= 1");
        if (batches.count(static_cast<int>(widx))) {
            parse_fail(line_no, "duplicate line for worker w" + std::to_string(widx));
        }
        std::vector<PointId> ids;
        std::string_view rest = trim(sv.substr(colon + 1));
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string_view tok = rest.substr(0, comma);
            const long id = parse_int(tok, line_no, "point id");
            if (id < 0) parse_fail(line_no, "point id must be non-negative");
            ids.push_back(static_cast<PointId>(id));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
            if (trim(rest).empty()) parse_fail(line_no, "trailing comma");
        }
        std::sort(ids.begin(), ids.end());
        batches[static_cast<int>(widx)] = std::move(ids);
    }
    if (batches.empty()) throw InputError("no worker lines found");
    const int k = batches.rbegin()->first;
    if (static_cast<int>(batches.size()) != k) {
        for (int i = 1; i <= k; ++i) {
            if (!batches.count(i)) {
                throw InputError("worker w" + std::to_string(i) + " is missing (found w" +
                                 std::to_string(k) + ")");
            }
        }
    }
    Assignment a;
    a.epoch = epoch;
    a.batches.reserve(batches.size());
    for (auto& [idx, ids] : batches) a.batches.push_back(std::move(ids));
    return a;
}

Assignment read_assignment_file(const std::string& path, int epoch) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open assignment file '" + path + "'");
    try {
        return read_assignment(in, epoch);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_assignment(std::ostream& out, const Assignment& a) {
    for (int i = 0; i < a.workers(); ++i) {
        out << 'w' << (i + 1) << ':';
        for (std::size_t j = 0; j < a.batches[i].size(); ++j) {
            out << (j == 0 ? " " : ",") << a.batches[i][j];
        }
        out << '\n';
    }
}

// ----------------------------------------------------------------------------
// Coded symbols
// ----------------------------------------------------------------------------

CodedSymbol make_symbol(SymbolKind kind, PointId a, PointId b, const Dataset& data,
                        std::optional<int> served_worker) {
    if (a == b) throw InputError("coded symbol components must be distinct");
    CodedSymbol sym;
    sym.kind = kind;
    sym.components = {std::min(a, b), std::max(a, b)};
    sym.served_worker = served_worker;
    const auto block_a = data.block(sym.components[0]);
    sym.payload.assign(block_a.begin(), block_a.end());
    xor_into(sym.payload, data.block(sym.components[1]));
    return sym;
}

void write_plan(std::ostream& out, const TransmissionPlan& plan) {
    for (const CodedSymbol& s : plan.phase1) {
        out << "P1 " << s.components[0] << '^' << s.components[1] << '\n';
    }
    for (const CodedSymbol& s : plan.phase2) {
        out << "P2@w" << (s.served_worker.value_or(-2) + 1) << ' ' << s.components[0] << '^'
            << s.components[1] << '\n';
    }
    out << "IGNORED w" << (plan.ignored_worker + 1) << '\n';
}

// ----------------------------------------------------------------------------
// Helpers
// ----------------------------------------------------------------------------

std::vector<PointId> sorted_intersection(const std::vector<PointId>& a,
                                         const std::vector<PointId>& b) {
    std::vector<PointId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<PointId> sorted_difference(const std::vector<PointId>& a,
                                       const std::vector<PointId>& b) {
    std::vector<PointId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void xor_into(Block& dst, std::span<const std::uint8_t> src) {
    if (dst.size() != src.size()) throw InputError("XOR operands differ in size");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

}  // namespace shufflecast
