#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace qkr {

using cplx = std::complex<double>;

/// Plain DFT pair on a fixed length.
///
/// forward:  out_k = sum_j in_j exp(-2 pi i j k / n)
/// backward: out_j = (1/n) sum_k in_k exp(+2 pi i j k / n)
class Dft {
public:
    explicit Dft(long n) : n_(n), in_(static_cast<std::size_t>(n)), out_(static_cast<std::size_t>(n)) {}

    long size() const { return n_; }

    void forward(Eigen::Ref<Eigen::VectorXcd> v)
    {
        copy_in(v);
        fft_.fwd(out_, in_);
        copy_out(v);
    }

    void backward(Eigen::Ref<Eigen::VectorXcd> v)
    {
        copy_in(v);
        fft_.inv(out_, in_);
        copy_out(v);
    }

private:
    void copy_in(const Eigen::Ref<Eigen::VectorXcd>& v)
    {
        for (long i = 0; i < n_; ++i)
            in_[static_cast<std::size_t>(i)] = v(i);
    }
    void copy_out(Eigen::Ref<Eigen::VectorXcd> v) const
    {
        for (long i = 0; i < n_; ++i)
            v(i) = out_[static_cast<std::size_t>(i)];
    }

    long n_;
    Eigen::FFT<double> fft_;
    std::vector<cplx> in_;
    std::vector<cplx> out_;
};

}  // namespace qkr
