#include "stepkdv/chebyshev.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace stepkdv::cheb {

std::vector<double> lobatto(int n) {
    if (n < 2) throw DomainError("lobatto: need at least two points");
    std::vector<double> t(n);
    const int N = n - 1;
    for (int j = 0; j < n; ++j) {
        // symmetric evaluation keeps t(-x) = -t(x) exactly
        t[j] = std::sin(pi * (2.0 * j - N) / (2.0 * N));
    }
    return t;
}

std::vector<double> lobatto_bary_weights(int n) {
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = (j % 2 == 0) ? 1.0 : -1.0;
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    return w;
}

namespace {

std::mutex cache_mutex;

template <class Key, class Val, class Make>
std::shared_ptr<const Val> cached(std::map<Key, std::shared_ptr<const Val>>& cache, const Key& k,
                                  Make make) {
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
    }
    auto v = std::make_shared<const Val>(make());
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto [it, inserted] = cache.emplace(k, v);
    return it->second;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_legendre(int m) {
    static std::map<int, std::shared_ptr<const GaussRule>> cache;
    return cached(cache, m, [m] {
        GaussRule r;
        r.x.resize(m);
        r.w.resize(m);
        gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(m);
        for (int i = 0; i < m; ++i) {
            gsl_integration_glfixed_point(-1.0, 1.0, i, &r.x[i], &r.w[i], tab);
        }
        gsl_integration_glfixed_table_free(tab);
        // ascending order
        std::vector<int> idx(m);
        for (int i = 0; i < m; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r.x[a] < r.x[b]; });
        GaussRule s;
        for (int i : idx) {
            s.x.push_back(r.x[i]);
            s.w.push_back(r.w[i]);
        }
        return s;
    });
}

std::shared_ptr<const std::vector<double>> clenshaw_curtis(int n) {
    static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
    return cached(cache, n, [n] {
        const int N = n - 1;
        std::vector<double> w(n, 0.0);
        if (N == 1) {
            w[0] = w[1] = 1.0;
            return w;
        }
        std::vector<double> v(N - 1, 1.0);
        if (N % 2 == 0) {
            w[0] = w[N] = 1.0 / (double(N) * N - 1.0);
            for (int k = 1; k < N / 2; ++k)
                for (int i = 1; i < N; ++i)
                    v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / N) / (4.0 * k * k - 1.0);
            for (int i = 1; i < N; ++i) v[i - 1] -= std::cos(pi * i) / (double(N) * N - 1.0);
        } else {
            w[0] = w[N] = 1.0 / (double(N) * N);
            for (int k = 1; k <= (N - 1) / 2; ++k)
                for (int i = 1; i < N; ++i)
                    v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / N) / (4.0 * k * k - 1.0);
        }
        for (int i = 1; i < N; ++i) w[i] = 2.0 * v[i - 1] / N;
        return w;
    });
}

void bary_row(int n, cplx x, cplx* out) {
    const auto t = lobatto(n);
    const auto w = lobatto_bary_weights(n);
    for (int j = 0; j < n; ++j) {
        if (x == cplx(t[j], 0.0)) {
            for (int k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
            return;
        }
    }
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) {
        out[j] = w[j] / (x - t[j]);
        s += out[j];
    }
    for (int j = 0; j < n; ++j) out[j] /= s;
}

cplx interp(const std::vector<cplx>& f, cplx x) {
    const int n = int(f.size());
    std::vector<cplx> row(n);
    bary_row(n, x, row.data());
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * f[j];
    return s;
}

std::shared_ptr<const Eigen::MatrixXd> lobatto_to_gauss(int n, int m) {
    static std::map<std::pair<int, int>, std::shared_ptr<const Eigen::MatrixXd>> cache;
    return cached(cache, std::make_pair(n, m), [n, m] {
        const auto g = gauss_legendre(m);
        Eigen::MatrixXd P(m, n);
        std::vector<cplx> row(n);
        for (int q = 0; q < m; ++q) {
            bary_row(n, g->x[q], row.data());
            for (int j = 0; j < n; ++j) P(q, j) = row[j].real();
        }
        return P;
    });
}

std::shared_ptr<const Eigen::MatrixXd> diff_matrix(int n) {
    static std::map<int, std::shared_ptr<const Eigen::MatrixXd>> cache;
    return cached(cache, n, [n] {
        const auto t = lobatto(n);
        const auto w = lobatto_bary_weights(n);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                D(i, j) = (w[j] / w[i]) / (t[i] - t[j]);
                s += D(i, j);
            }
            D(i, i) = -s;
        }
        return D;
    });
}

}  // namespace stepkdv::cheb
