#include "fracns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace fracns {

namespace {
std::mutex plan_mutex;

fftw_plan get_plan(int n, int sign, fftw_complex* buf) {
    // FFTW_ESTIMATE keeps planning deterministic and allows plan reuse with
    // the new-array execute interface.
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_plan p = fftw_plan_dft_3d(n, n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[key] = p;
    return p;
}
}  // namespace

void dft3(std::vector<std::complex<double>>& data, int n, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan p = get_plan(n, sign, buf);
    fftw_execute_dft(p, buf, buf);
}

SpectralField fourier_forward(const ScalarField& field) {
    const TorusGrid& g = field.grid;
    SpectralField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.c[i] = field.v[i];
    dft3(out.c, g.n, FFTW_FORWARD);
    double h3 = g.spacing() * g.spacing() * g.spacing();
    for (auto& z : out.c) z *= h3;
    return out;
}

ScalarField fourier_inverse(const SpectralField& spec) {
    const TorusGrid& g = spec.grid;
    std::vector<std::complex<double>> buf = spec.c;
    dft3(buf, g.n, FFTW_BACKWARD);
    ScalarField out(g);
    double inv = 1.0 / (g.L * g.L * g.L);
    for (std::size_t i = 0; i < g.size(); ++i) out.v[i] = buf[i].real() * inv;
    return out;
}

}  // namespace fracns
