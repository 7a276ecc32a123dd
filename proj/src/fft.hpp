#pragma once

// Thin wrappers over Eigen's FFT module. The plan cache inside Eigen::FFT is
// not thread safe, so each thread keeps its own instance.

#include <unsupported/Eigen/FFT>

#include "ckdv/grid.hpp"

namespace ckdv::detail {

inline Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> e;
        e.SetFlag(Eigen::FFT<double>::Unscaled);
        return e;
    }();
    return engine;
}

/// out_k = sum_j in_j e^{-2 pi i jk/n}
inline void dft(CVec& out, const CVec& in) {
    out.resize(in.size());
    fft_engine().fwd(out.data(), in.data(), static_cast<int>(in.size()));
}

/// out_j = sum_k in_k e^{+2 pi i jk/n} (no 1/n)
inline void idft(CVec& out, const CVec& in) {
    out.resize(in.size());
    fft_engine().inv(out.data(), in.data(), static_cast<int>(in.size()));
}

inline Eigen::FFT<double>& half_engine() {
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> e;
        e.SetFlag(Eigen::FFT<double>::Unscaled);
        e.SetFlag(Eigen::FFT<double>::HalfSpectrum);
        return e;
    }();
    return engine;
}

/// Real-input forward transform, keeping bins 0..n/2.
inline void rdft(CVec& out, const RVec& in) {
    out.resize(in.size() / 2 + 1);
    half_engine().fwd(out.data(), in.data(), static_cast<int>(in.size()));
}

/// Real-output inverse from bins 0..n/2 (no 1/n).
inline void irdft(RVec& out, const CVec& half, int n) {
    out.resize(n);
    half_engine().inv(out.data(), half.data(), n);
}

}  // namespace ckdv::detail
