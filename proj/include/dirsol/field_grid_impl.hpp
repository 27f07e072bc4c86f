#pragma once

#include <vector>

namespace dirsol {

template <class F>
void for_each_mode(const GridSpec& g, F&& f) {
    const int N = g.N;
    std::vector<double> kk(N);
    for (int n = 0; n < N; ++n) kk[n] = g.k(n);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                f(g.index(a, b, c), Vec3(kk[a], kk[b], kk[c]), a != N / 2 && b != N / 2 && c != N / 2);
}

template <class T, class F>
T reduce_modes(const GridSpec& g, T zero, F&& f) {
    const int N = g.N;
    std::vector<double> kk(N);
    for (int n = 0; n < N; ++n) kk[n] = g.k(n);
    std::vector<T> slab(N, zero);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < N; ++a) {
        T acc = zero;
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                acc += f(g.index(a, b, c), Vec3(kk[a], kk[b], kk[c]), a != N / 2 && b != N / 2 && c != N / 2);
        slab[a] = acc;
    }
    T total = zero;
    for (const T& s : slab) total += s;
    return total;
}

template <class F>
void for_each_node(const GridSpec& g, F&& f) {
    const int N = g.N;
#pragma omp parallel for schedule(static)
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) f(g.index(a, b, c), Vec3(g.x(a), g.x(b), g.x(c)));
}

}  // namespace dirsol
