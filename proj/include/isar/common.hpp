#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isar {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy. Each error carries a stable machine-readable name that the
// CLI maps to a distinct exit code.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define ISAR_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

ISAR_DEFINE_ERROR(NonPowerOfTwo);
ISAR_DEFINE_ERROR(UnknownModel);
ISAR_DEFINE_ERROR(DelayOutOfFrame);
ISAR_DEFINE_ERROR(WindowTooShort);
ISAR_DEFINE_ERROR(NoTarget);
ISAR_DEFINE_ERROR(SingularGram);
ISAR_DEFINE_ERROR(ZeroReference);
ISAR_DEFINE_ERROR(NegativeRadicand);
ISAR_DEFINE_ERROR(ZeroVelocity);
ISAR_DEFINE_ERROR(DimensionMismatch);
ISAR_DEFINE_ERROR(ConfigParse);
ISAR_DEFINE_ERROR(Io);

#undef ISAR_DEFINE_ERROR

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Principal-value angle in (-pi, pi].
inline double principal_angle(const cdouble& z) {
    double a = std::arg(z);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw DimensionMismatch("median of empty vector");
    std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.begin() + n / 2);
    return 0.5 * (v[n / 2 - 1] + hi);
}

}  // namespace isar
