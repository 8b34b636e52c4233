#pragma once

#include "globalnull/statistics.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace globalnull {

// Raised when a rejection is requested for a test whose threshold is not in
// the table. Thresholds are never computed implicitly.
class UncalibratedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for unreadable, corrupt or version-mismatched cache files.
class CacheFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationKey {
    TestKind test = TestKind::Max;
    std::size_t n = 0;
    double alpha = 0.05;
    std::size_t reps = 0;
    std::uint64_t seed = 0;

    auto operator<=>(const CalibrationKey&) const = default;
};

struct CriticalValue {
    CalibrationKey key;
    double threshold = 0.0;
};

inline constexpr int cache_format_version = 1;

// Monte Carlo rejection thresholds keyed by (test, n, alpha, reps, seed).
// Concurrent readers, exclusive writers.
class CriticalValueTable {
public:
    CriticalValueTable();
    CriticalValueTable(const CriticalValueTable& other);
    CriticalValueTable& operator=(const CriticalValueTable& other);

    void insert(const CalibrationKey& key, double threshold);
    std::optional<double> find(const CalibrationKey& key) const;
    bool contains(const CalibrationKey& key) const { return find(key).has_value(); }

    // The unique threshold for (test, n, alpha). Throws UncalibratedError when
    // none exists and std::invalid_argument when several (reps, seed) runs
    // match.
    double threshold(TestKind test, std::size_t n, double alpha) const;

    std::vector<CriticalValue> entries() const;
    std::size_t size() const;
    void merge(const CriticalValueTable& other);

    const std::string& created() const { return created_; }

    // Line-oriented text: a version header, then one record per entry:
    //   test n alpha reps seed threshold generator
    // with alpha and threshold at 17 significant digits.
    void write(std::ostream& os) const;
    static CriticalValueTable read(std::istream& is);

    // save() writes a sibling temporary and renames it into place.
    void save(const std::filesystem::path& path) const;
    static CriticalValueTable load(const std::filesystem::path& path);

private:
    mutable std::shared_mutex mutex_;
    std::map<CalibrationKey, double> entries_;
    std::string created_;
};

// $GLOBALNULL_CACHE_DIR/critical_values.txt, else ~/.cache/globalnull/...,
// else ./.globalnull-cache/...
std::filesystem::path default_cache_path();

// Empty table when the file does not exist; CacheFormatError when it is bad.
CriticalValueTable load_cache(const std::filesystem::path& path);

// Merges `additions` into the cache file under an exclusive file lock.
void update_cache(const std::filesystem::path& path, const CriticalValueTable& additions);

// Exact max-|X| threshold under independence: the two-sided normal quantile
// at per-coordinate level 1 - (1 - alpha)^(1/n).
double sidak_max_threshold(std::size_t n, double alpha);

// Order statistic of rank ceil((1 - alpha) * reps) (1-based, at least 1).
double empirical_upper_quantile(std::span<const double> values, double alpha);
std::size_t upper_quantile_rank(std::size_t reps, double alpha);

// Empirical (1 - alpha) null quantile of a scalar statistic from `reps`
// independent null vectors. Deterministic in (seed, reps) for any thread
// count. Inserts into `table` when given. Hybrid throws std::domain_error.
double calibrate(TestKind test, std::size_t n, double alpha, std::size_t reps, std::uint64_t seed,
                 CriticalValueTable* table = nullptr, unsigned threads = 1);

// Every scalar threshold needed to run `tests` at level alpha; Hybrid
// expands to Max and ChiSquare at alpha/2. One shared set of null replicates
// serves all of them, so the values equal per-test calibrate() calls.
// Entries already in the table are kept. Returns the number of new entries.
std::size_t calibrate_tests(std::span<const TestKind> tests, std::size_t n, double alpha, std::size_t reps,
                            std::uint64_t seed, CriticalValueTable& table, unsigned threads = 1);

// Threshold lookup resolved once for repeated decisions.
struct RejectionRule {
    TestKind test = TestKind::Max;
    double threshold = 0.0;
    // Hybrid only: threshold is the max-|X| part, this the chi-square part.
    double chisq_threshold = 0.0;

    bool rejects(const StatisticValues& s) const;
};

RejectionRule rejection_rule(TestKind test, std::size_t n, const CriticalValueTable& table, double alpha);

// Strict exceedance of the calibrated threshold; Hybrid uses the union rule.
bool reject(TestKind test, std::span<const double> x, const CriticalValueTable& table, double alpha);

} // namespace globalnull
