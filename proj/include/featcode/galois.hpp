#pragma once

#include <cstdint>
#include <vector>

namespace featcode {

/// GF(2^m) arithmetic over log/antilog tables. Orders used by the two
/// symbologies: 16, 64, 256 (two different primitive polynomials), 1024,
/// 4096.
class GaloisField {
public:
    GaloisField(int order, int primitive_poly);

    int order() const { return order_; }
    int primitive_poly() const { return primitive_; }

    int add(int a, int b) const { return a ^ b; }

    int multiply(int a, int b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[(log_[a] + log_[b]) % (order_ - 1)];
    }

    int inverse(int a) const;

    int exp(int power) const { return exp_[power % (order_ - 1)]; }
    int log(int a) const;

    /// Evaluates a polynomial (coefficients in descending power order) at x.
    int eval_poly(const std::vector<int>& coefficients, int x) const;

    static const GaloisField& qr_field();            // GF(256), poly 0x11D
    static const GaloisField& aztec_param_field();   // GF(16),  poly 0x13
    static const GaloisField& aztec_data6_field();   // GF(64),  poly 0x43
    static const GaloisField& aztec_data8_field();   // GF(256), poly 0x12D
    static const GaloisField& aztec_data10_field();  // GF(1024), poly 0x409
    static const GaloisField& aztec_data12_field();  // GF(4096), poly 0x1069

private:
    int order_;
    int primitive_;
    std::vector<int> exp_;
    std::vector<int> log_;
};

/// Systematic Reed-Solomon encoder: parity = remainder of data*x^n modulo
/// the generator polynomial with roots alpha^first_root .. alpha^(first_root
/// + n_parity - 1). QR uses first_root 0, Aztec uses 1.
class ReedSolomonEncoder {
public:
    ReedSolomonEncoder(const GaloisField& field, int n_parity, int first_root = 0);

    std::vector<int> parity(const std::vector<int>& data) const;

    /// Syndrome s_i = codeword evaluated at alpha^(first_root + i); all zero
    /// for an intact codeword.
    std::vector<int> syndromes(const std::vector<int>& codeword) const;

    int n_parity() const { return n_parity_; }
    const std::vector<int>& generator() const { return generator_; }

private:
    const GaloisField& field_;
    int n_parity_;
    int first_root_;
    std::vector<int> generator_;  // descending powers, monic
};

}  // namespace featcode
