#include "pvl/fft.hpp"

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <tuple>

#include "pvl/error.hpp"

namespace pvl {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan with the
// new-array interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanCache {
    std::map<std::tuple<int, int, int>, fftw_plan> complex_plans;
    std::map<std::pair<int, int>, fftw_plan> dst_plans;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

fftw_plan complex_plan(int dim, int n, int sign)
{
    std::lock_guard lock(planner_mutex());
    auto key = std::make_tuple(dim, n, sign);
    auto& plans = cache().complex_plans;
    if (auto it = plans.find(key); it != plans.end())
        return it->second;

    std::size_t total = 1;
    std::array<int, 3> dims{n, n, n};
    for (int k = 0; k < dim; ++k)
        total *= static_cast<std::size_t>(n);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    require(plan != nullptr, ErrorCode::InvalidField, "FFTW could not create a plan");
    plans.emplace(key, plan);
    return plan;
}

fftw_plan dst_plan(int rows, int n)
{
    std::lock_guard lock(planner_mutex());
    auto key = std::make_pair(rows, n);
    auto& plans = cache().dst_plans;
    if (auto it = plans.find(key); it != plans.end())
        return it->second;

    auto* buf = fftw_alloc_real(static_cast<std::size_t>(rows) * n);
    fftw_r2r_kind kind = FFTW_RODFT00;
    fftw_plan plan = fftw_plan_many_r2r(1, &n, rows, buf, nullptr, 1, n, buf, nullptr, 1, n, &kind,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    require(plan != nullptr, ErrorCode::InvalidField, "FFTW could not create a DST plan");
    plans.emplace(key, plan);
    return plan;
}

void check_size(std::span<Complex> data, int dim, int n)
{
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k)
        total *= static_cast<std::size_t>(n);
    require(dim >= 1 && dim <= 3 && data.size() == total, ErrorCode::InvalidField,
            "FFT buffer size does not match n^dim");
}

} // namespace

void fft_forward(std::span<Complex> data, int dim, int n)
{
    check_size(data, dim, n);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(complex_plan(dim, n, FFTW_FORWARD), p, p);
}

void fft_inverse(std::span<Complex> data, int dim, int n)
{
    check_size(data, dim, n);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(complex_plan(dim, n, FFTW_BACKWARD), p, p);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& z : data)
        z *= scale;
}

void dst1_rows(std::span<double> data, int rows, int n)
{
    require(data.size() == static_cast<std::size_t>(rows) * n, ErrorCode::InvalidField,
            "DST buffer size does not match rows*n");
    fftw_execute_r2r(dst_plan(rows, n), data.data(), data.data());
}

} // namespace pvl
