#include "hcmeta/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcmeta/errors.hpp"

namespace hcmeta {

namespace {

using Matrix = std::vector<double>;

void multiply(const Matrix& a, const Matrix& b, Matrix& c, int m) {
    std::fill(c.begin(), c.end(), 0.0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            double aik = a[i * m + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < m; ++j) c[i * m + j] += aik * b[k * m + j];
        }
}

// H^n with a separate power-of-ten exponent to avoid overflow.
void power(const Matrix& h, int eh, Matrix& v, int& ev, int m, std::size_t n) {
    if (n == 1) {
        v = h;
        ev = eh;
        return;
    }
    power(h, eh, v, ev, m, n / 2);
    Matrix w(m * m);
    multiply(v, v, w, m);
    int ew = 2 * ev;
    if (n % 2 == 1) {
        multiply(h, w, v, m);
        ev = eh + ew;
    } else {
        v = w;
        ev = ew;
    }
    int centre = (m / 2) * m + m / 2;
    if (v[centre] > 1e140) {
        for (double& x : v) x *= 1e-140;
        ev += 140;
    }
}

// P(D_n < d), Marsaglia, Tsang and Wang (2003).
double mtw_cdf(std::size_t n, double d) {
    double nd = static_cast<double>(n) * d;
    int k = static_cast<int>(nd) + 1;
    int m = 2 * k - 1;
    double h = k - nd;
    Matrix hm(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) hm[i * m + j] = i - j + 1 < 0 ? 0.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        hm[i * m] -= std::pow(h, i + 1);
        hm[(m - 1) * m + i] -= std::pow(h, m - i);
    }
    hm[(m - 1) * m] += 2 * h - 1 > 0 ? std::pow(2 * h - 1, m) : 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int g = 1; g <= i - j + 1; ++g) hm[i * m + j] /= g;
    Matrix q;
    int eq = 0;
    power(hm, 0, q, eq, m, n);
    double s = q[(k - 1) * m + k - 1];
    for (std::size_t i = 1; i <= n; ++i) {
        s = s * static_cast<double>(i) / static_cast<double>(n);
        if (s < 1e-140) {
            s *= 1e140;
            eq -= 140;
        }
    }
    return s * std::pow(10.0, eq);
}

double asymptotic_tail(std::size_t n, double d) {
    double rn = std::sqrt(static_cast<double>(n));
    double t = d * (rn + 0.12 + 0.11 / rn);
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double kolmogorov_pvalue(std::size_t n, double d, std::string* method) {
    if (n == 0) throw InvalidArgument("kolmogorov_pvalue: n must be positive");
    if (d <= 0.0) {
        if (method) *method = "exact";
        return 1.0;
    }
    if (d >= 1.0) {
        if (method) *method = "exact";
        return 0.0;
    }
    if (static_cast<double>(n) * d * d >= 18.0) {
        if (method) *method = "asymptotic";
        return asymptotic_tail(n, d);
    }
    if (method) *method = "exact";
    return std::clamp(1.0 - mtw_cdf(n, d), 0.0, 1.0);
}

KsResult ks_exponential_test(const std::vector<double>& samples, std::size_t min_samples) {
    if (samples.size() < min_samples)
        throw InvalidArgument("ks_exponential_test: need at least " + std::to_string(min_samples) + " samples, got " +
                              std::to_string(samples.size()));
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    if (!(mean > 0.0)) throw InvalidArgument("ks_exponential_test: samples must have a positive mean");
    std::vector<double> x(samples);
    for (double& v : x) v /= mean;
    std::sort(x.begin(), x.end());
    KsResult r;
    r.n = x.size();
    double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = -std::expm1(-x[i]);
        r.statistic = std::max({r.statistic, (i + 1) / n - f, f - i / n});
    }
    r.p_value = kolmogorov_pvalue(r.n, r.statistic, &r.method);
    return r;
}

StatThresholds StatThresholds::from_json(const nlohmann::json& j) {
    StatThresholds t;
    t.ks_p_min = j.value("ks_p_min", t.ks_p_min);
    t.ks_samples = j.value("ks_samples", t.ks_samples);
    t.chi_square_p_min = j.value("chi_square_p_min", t.chi_square_p_min);
    t.single_crossing_min = j.value("single_crossing_min", t.single_crossing_min);
    return t;
}

nlohmann::json StatThresholds::to_json() const {
    return {{"ks_p_min", ks_p_min},
            {"ks_samples", ks_samples},
            {"chi_square_p_min", chi_square_p_min},
            {"single_crossing_min", single_crossing_min}};
}

MeanEstimate estimate_mean(const std::vector<double>& x) {
    MeanEstimate e;
    if (x.empty()) return e;
    double n = static_cast<double>(x.size());
    e.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - e.mean) * (v - e.mean);
        e.variance = ss / (n - 1);
        e.std_error = std::sqrt(e.variance / n);
    }
    return e;
}

}  // namespace hcmeta
