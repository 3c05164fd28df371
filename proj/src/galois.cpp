#include "featcode/galois.hpp"

#include "featcode/errors.hpp"

namespace featcode {

GaloisField::GaloisField(int order, int primitive_poly)
    : order_(order), primitive_(primitive_poly), exp_(order), log_(order) {
    if (order < 2 || (order & (order - 1)) != 0)
        throw ValueError("field order must be a power of two");
    int x = 1;
    for (int i = 0; i < order_ - 1; ++i) {
        exp_[i] = x;
        log_[x] = i;
        x <<= 1;
        if (x & order_) x ^= primitive_poly;
    }
    if (x != 1) throw ValueError("polynomial is not primitive for this order");
    log_[0] = -1;
}

int GaloisField::inverse(int a) const {
    if (a == 0) throw ValueError("zero has no inverse");
    return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
}

int GaloisField::log(int a) const {
    if (a == 0) throw ValueError("log of zero");
    return log_[a];
}

int GaloisField::eval_poly(const std::vector<int>& coefficients, int x) const {
    int acc = 0;
    for (const int c : coefficients) acc = multiply(acc, x) ^ c;
    return acc;
}

const GaloisField& GaloisField::qr_field() {
    static const GaloisField field(256, 0x11D);
    return field;
}
const GaloisField& GaloisField::aztec_param_field() {
    static const GaloisField field(16, 0x13);
    return field;
}
const GaloisField& GaloisField::aztec_data6_field() {
    static const GaloisField field(64, 0x43);
    return field;
}
const GaloisField& GaloisField::aztec_data8_field() {
    static const GaloisField field(256, 0x12D);
    return field;
}
const GaloisField& GaloisField::aztec_data10_field() {
    static const GaloisField field(1024, 0x409);
    return field;
}
const GaloisField& GaloisField::aztec_data12_field() {
    static const GaloisField field(4096, 0x1069);
    return field;
}

ReedSolomonEncoder::ReedSolomonEncoder(const GaloisField& field, int n_parity, int first_root)
    : field_(field), n_parity_(n_parity), first_root_(first_root) {
    if (n_parity < 1 || n_parity >= field.order())
        throw ValueError("parity count out of range for field");
    // generator = product of (x - alpha^i) for i in [first_root, first_root + n_parity)
    generator_.assign(1, 1);
    for (int i = 0; i < n_parity; ++i) {
        const int root = field_.exp(first_root_ + i);
        std::vector<int> next(generator_.size() + 1, 0);
        for (std::size_t j = 0; j < generator_.size(); ++j) {
            next[j] ^= field_.multiply(generator_[j], 1);
            next[j + 1] ^= field_.multiply(generator_[j], root);
        }
        generator_ = std::move(next);
    }
}

std::vector<int> ReedSolomonEncoder::parity(const std::vector<int>& data) const {
    for (const int d : data) {
        if (d < 0 || d >= field_.order())
            throw ValueError("data element " + std::to_string(d) + " outside field range");
    }
    // polynomial long division remainder
    std::vector<int> remainder(static_cast<std::size_t>(n_parity_), 0);
    for (const int d : data) {
        const int factor = d ^ remainder.front();
        remainder.erase(remainder.begin());
        remainder.push_back(0);
        if (factor != 0) {
            for (std::size_t j = 0; j < remainder.size(); ++j) {
                remainder[j] ^= field_.multiply(generator_[j + 1], factor);
            }
        }
    }
    return remainder;
}

std::vector<int> ReedSolomonEncoder::syndromes(const std::vector<int>& codeword) const {
    std::vector<int> result(static_cast<std::size_t>(n_parity_));
    for (int i = 0; i < n_parity_; ++i) {
        result[static_cast<std::size_t>(i)] =
            field_.eval_poly(codeword, field_.exp(first_root_ + i));
    }
    return result;
}

}  // namespace featcode
