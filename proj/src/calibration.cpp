#include "globalnull/calibration.hpp"

#include "globalnull/normal.hpp"
#include "globalnull/parallel.hpp"
#include "globalnull/rng.hpp"

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

namespace globalnull {

namespace {

constexpr std::string_view cache_magic = "globalnull-critical-values";
constexpr std::string_view record_header = "test n alpha reps seed threshold generator";

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void check_alpha(double alpha, bool allow_one) {
    const bool ok = alpha > 0.0 && (allow_one ? alpha <= 1.0 : alpha < 1.0);
    if (!ok) throw std::domain_error("alpha must lie in (0, 1)" + std::string(allow_one ? " or equal 1" : ""));
}

// RAII exclusive lock on a sibling ".lock" file.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& target) {
        const auto lock_path = target.string() + ".lock";
        fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw std::runtime_error("cannot open lock file " + lock_path);
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw std::runtime_error("cannot lock " + lock_path);
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

} // namespace

CriticalValueTable::CriticalValueTable(): created_(utc_timestamp()) {}

CriticalValueTable::CriticalValueTable(const CriticalValueTable& other) {
    std::shared_lock lock(other.mutex_);
    entries_ = other.entries_;
    created_ = other.created_;
}

CriticalValueTable& CriticalValueTable::operator=(const CriticalValueTable& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_);
    std::shared_lock other_lock(other.mutex_);
    entries_ = other.entries_;
    created_ = other.created_;
    return *this;
}

void CriticalValueTable::insert(const CalibrationKey& key, double threshold) {
    if (std::isnan(threshold)) throw std::invalid_argument("threshold is NaN");
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(key, threshold);
}

std::optional<double> CriticalValueTable::find(const CalibrationKey& key) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

double CriticalValueTable::threshold(TestKind test, std::size_t n, double alpha) const {
    std::shared_lock lock(mutex_);
    std::optional<double> found;
    for (const auto& [key, value]: entries_) {
        if (key.test != test || key.n != n || key.alpha != alpha) continue;
        if (found) {
            throw std::invalid_argument("several calibrations match test " + std::string(to_string(test)) +
                                        "; select one run");
        }
        found = value;
    }
    if (!found) {
        throw UncalibratedError("uncalibrated: no threshold for test " + std::string(to_string(test)) +
                                " at n=" + std::to_string(n) + " alpha=" + format_double(alpha));
    }
    return *found;
}

std::vector<CriticalValue> CriticalValueTable::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<CriticalValue> out;
    out.reserve(entries_.size());
    for (const auto& [key, value]: entries_) out.push_back({key, value});
    return out;
}

std::size_t CriticalValueTable::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void CriticalValueTable::merge(const CriticalValueTable& other) {
    for (const auto& cv: other.entries()) insert(cv.key, cv.threshold);
}

void CriticalValueTable::write(std::ostream& os) const {
    std::shared_lock lock(mutex_);
    os << cache_magic << ' ' << cache_format_version << '\n';
    os << "generator " << generator_id << '\n';
    os << "created " << created_ << '\n';
    os << record_header << '\n';
    for (const auto& [key, value]: entries_) {
        os << to_string(key.test) << ' ' << key.n << ' ' << format_double(key.alpha) << ' ' << key.reps << ' '
           << key.seed << ' ' << format_double(value) << ' ' << generator_id << '\n';
    }
}

CriticalValueTable CriticalValueTable::read(std::istream& is) {
    auto fail = [](std::size_t line_no, const std::string& why) -> CacheFormatError {
        return CacheFormatError("critical-value cache, line " + std::to_string(line_no) + ": " + why);
    };
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(is, line)) return false;
        ++line_no;
        return true;
    };

    if (!next_line()) throw fail(1, "empty file");
    {
        std::istringstream ls(line);
        std::string magic;
        int version = 0;
        if (!(ls >> magic >> version) || magic != cache_magic) throw fail(line_no, "not a critical-value cache");
        if (version != cache_format_version) {
            throw fail(line_no, "format version " + std::to_string(version) + " is not supported");
        }
    }
    if (!next_line() || line != "generator " + std::string(generator_id)) {
        throw fail(line_no, "generator mismatch");
    }
    CriticalValueTable table;
    if (!next_line() || line.rfind("created ", 0) != 0) throw fail(line_no, "missing creation time");
    table.created_ = line.substr(8);
    if (!next_line() || line != record_header) throw fail(line_no, "missing column header");

    while (next_line()) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string test, alpha, threshold, generator, extra;
        CalibrationKey key;
        if (!(ls >> test >> key.n >> alpha >> key.reps >> key.seed >> threshold >> generator) || (ls >> extra)) {
            throw fail(line_no, "malformed record");
        }
        if (generator != generator_id) throw fail(line_no, "generator mismatch");
        try {
            key.test = parse_test_kind(test);
            std::size_t used = 0;
            key.alpha = std::stod(alpha, &used);
            if (used != alpha.size()) throw std::invalid_argument("alpha");
            const double value = std::stod(threshold, &used);
            if (used != threshold.size()) throw std::invalid_argument("threshold");
            table.entries_.insert_or_assign(key, value);
        } catch (const std::logic_error& e) {
            throw fail(line_no, std::string("bad field: ") + e.what());
        }
    }
    return table;
}

void CriticalValueTable::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp);
        write(os);
        os.flush();
        if (!os) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CriticalValueTable CriticalValueTable::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw CacheFormatError("cannot open " + path.string());
    return read(is);
}

std::filesystem::path default_cache_path() {
    if (const char* dir = std::getenv("GLOBALNULL_CACHE_DIR"); dir && *dir) {
        return std::filesystem::path(dir) / "critical_values.txt";
    }
    if (const char* home = std::getenv("HOME"); home && *home) {
        return std::filesystem::path(home) / ".cache" / "globalnull" / "critical_values.txt";
    }
    return std::filesystem::path(".globalnull-cache") / "critical_values.txt";
}

CriticalValueTable load_cache(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    return CriticalValueTable::load(path);
}

void update_cache(const std::filesystem::path& path, const CriticalValueTable& additions) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    FileLock lock(path);
    CriticalValueTable merged = load_cache(path);
    merged.merge(additions);
    merged.save(path);
}

double sidak_max_threshold(std::size_t n, double alpha) {
    check_alpha(alpha, false);
    if (n < 1) throw std::domain_error("sidak_max_threshold: n must be positive");
    // Per-coordinate level 1 - (1 - alpha)^(1/n), without cancellation.
    const double level = -std::expm1(std::log1p(-alpha) / static_cast<double>(n));
    return normal_upper_quantile(0.5 * level);
}

std::size_t upper_quantile_rank(std::size_t reps, double alpha) {
    const double x = (1.0 - alpha) * static_cast<double>(reps);
    const double nearest = std::nearbyint(x);
    const double rank = std::fabs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
    return std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, reps);
}

double empirical_upper_quantile(std::span<const double> values, double alpha) {
    if (values.empty()) throw std::invalid_argument("empirical_upper_quantile: no values");
    check_alpha(alpha, true);
    std::vector<double> v(values.begin(), values.end());
    const std::size_t rank = upper_quantile_rank(v.size(), alpha);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
    return v[rank - 1];
}

std::size_t calibrate_tests(std::span<const TestKind> tests, std::size_t n, double alpha, std::size_t reps,
                            std::uint64_t seed, CriticalValueTable& table, unsigned threads) {
    check_alpha(alpha, true);
    if (n < 1) throw std::domain_error("calibrate: n must be positive");
    if (reps < 100) throw std::domain_error("calibrate: reps must be at least 100");

    std::vector<CalibrationKey> wanted;
    StatisticMask mask;
    for (TestKind test: tests) {
        if (test == TestKind::Hybrid) {
            for (TestKind part: {TestKind::Max, TestKind::ChiSquare}) {
                wanted.push_back({part, n, alpha * 0.5, reps, seed});
            }
        } else {
            if (test == TestKind::BerkJones && n < 2) throw std::domain_error("calibrate: Berk-Jones needs n >= 2");
            wanted.push_back({test, n, alpha, reps, seed});
        }
    }
    std::erase_if(wanted, [&](const CalibrationKey& k) { return table.contains(k); });
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    if (wanted.empty()) return 0;
    for (const auto& k: wanted) mask.require(k.test);

    std::vector<StatisticValues> draws(reps);
    parallel_for(reps, threads, [&](std::size_t begin, std::size_t end) {
        StatisticsWorkspace workspace;
        std::vector<double> x(n);
        for (std::size_t rep = begin; rep < end; ++rep) {
            PhiloxStream stream({seed, StreamPurpose::Calibration, rep, 0});
            stream.fill_normal(x);
            draws[rep] = workspace.compute(x, mask);
        }
    });

    std::vector<double> values(reps);
    for (const auto& key: wanted) {
        for (std::size_t rep = 0; rep < reps; ++rep) values[rep] = draws[rep].get(key.test);
        table.insert(key, empirical_upper_quantile(values, key.alpha));
    }
    return wanted.size();
}

double calibrate(TestKind test, std::size_t n, double alpha, std::size_t reps, std::uint64_t seed,
                 CriticalValueTable* table, unsigned threads) {
    if (test == TestKind::Hybrid) {
        throw std::domain_error("calibrate: the hybrid test is calibrated through Max and ChiSquare at alpha/2");
    }
    CriticalValueTable local;
    CriticalValueTable& target = table ? *table : local;
    const TestKind one[] = {test};
    calibrate_tests(one, n, alpha, reps, seed, target, threads);
    return *target.find({test, n, alpha, reps, seed});
}

bool RejectionRule::rejects(const StatisticValues& s) const {
    if (test == TestKind::Hybrid) return s.max > threshold || s.chisq > chisq_threshold;
    return s.get(test) > threshold;
}

RejectionRule rejection_rule(TestKind test, std::size_t n, const CriticalValueTable& table, double alpha) {
    if (test == TestKind::Hybrid) {
        return {test, table.threshold(TestKind::Max, n, alpha * 0.5),
                table.threshold(TestKind::ChiSquare, n, alpha * 0.5)};
    }
    return {test, table.threshold(test, n, alpha), 0.0};
}

bool reject(TestKind test, std::span<const double> x, const CriticalValueTable& table, double alpha) {
    const RejectionRule rule = rejection_rule(test, x.size(), table, alpha);
    StatisticMask mask;
    mask.require(test);
    StatisticsWorkspace workspace;
    return rule.rejects(workspace.compute(x, mask));
}

} // namespace globalnull
