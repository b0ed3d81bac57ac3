#include "pandora/scalar.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "pandora/error.hpp"

namespace pandora {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

Scalar parse_scalar(std::string_view text) {
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
        throw ParseError("not a rational literal: \"" + std::string(text) + "\"");
    }
    mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num));
    mpz_class d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator: \"" + std::string(text) + "\"");
    Scalar q(n, d);
    q.canonicalize();
    return q;
}

std::string to_string(const Scalar& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_decimal(const Scalar& x, int digits) {
    mpf_class f(x, 256);
    mp_exp_t exp = 0;
    std::string mant = f.get_str(exp, 10, digits);
    if (mant.empty()) return "0";
    std::ostringstream os;
    bool neg = mant[0] == '-';
    if (neg) mant.erase(0, 1);
    if (neg) os << '-';
    if (exp <= 0) {
        os << "0." << std::string(static_cast<std::size_t>(-exp), '0') << mant;
    } else if (static_cast<std::size_t>(exp) >= mant.size()) {
        os << mant << std::string(static_cast<std::size_t>(exp) - mant.size(), '0');
    } else {
        os << mant.substr(0, exp) << '.' << mant.substr(exp);
    }
    return os.str();
}

double to_double(const Scalar& x) { return x.get_d(); }

Scalar pow2(long k) {
    mpz_class p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(k < 0 ? -k : k));
    if (k >= 0) return Scalar(p);
    Scalar q(mpz_class(1), p);
    q.canonicalize();
    return q;
}

Scalar floor_to_grid(const Scalar& x, const Scalar& step) {
    Scalar ratio = x / step;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    return Scalar(f) * step;
}

}  // namespace pandora
