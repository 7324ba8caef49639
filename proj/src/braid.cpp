#include "tkh/braid.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <numeric>
#include <sstream>

namespace tkh {

namespace {

constexpr std::size_t kMaxLetters = 10'000'000;

void check_word(const BraidWord& w) {
    if (w.strands < 1) throw std::invalid_argument("strand count must be positive");
    for (const Letter& l : w.letters) {
        if (l.index < 1 || l.index > w.strands - 1)
            throw std::invalid_argument("generator index out of range 1.." + std::to_string(w.strands - 1));
        if (l.sign != 1 && l.sign != -1) throw std::invalid_argument("letter sign must be +1 or -1");
    }
}

class Parser {
public:
    Parser(const std::string& text, int strands) : s_(text), b_(strands) {}

    std::vector<Letter> run() {
        auto out = sequence(false);
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return out;
    }

private:
    const std::string& s_;
    int b_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw BraidParseError(msg + " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    long long integer() {
        std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == digits) {
            pos_ = start;
            fail("malformed token");
        }
        if (pos_ - digits > 9) fail("exponent overflow");
        return std::stoll(s_.substr(start, pos_ - start));
    }

    static void append_power(std::vector<Letter>& out, const std::vector<Letter>& body, long long m) {
        if (m != 0 && body.size() > kMaxLetters / static_cast<std::size_t>(std::llabs(m)))
            throw BraidParseError("exponent overflow");
        if (out.size() + body.size() * static_cast<std::size_t>(std::llabs(m)) > kMaxLetters)
            throw BraidParseError("exponent overflow");
        for (long long r = 0; r < std::llabs(m); ++r) {
            if (m > 0) {
                out.insert(out.end(), body.begin(), body.end());
            } else {
                for (auto it = body.rbegin(); it != body.rend(); ++it) out.push_back({it->index, -it->sign});
            }
        }
    }

    std::vector<Letter> sequence(bool nested) {
        std::vector<Letter> out;
        while (true) {
            skip_ws();
            if (pos_ == s_.size()) {
                if (nested) fail("unbalanced parenthesis");
                return out;
            }
            char c = s_[pos_];
            if (c == ')') {
                if (!nested) fail("unbalanced parenthesis");
                return out;
            }
            if (c == '(') {
                ++pos_;
                auto body = sequence(true);
                ++pos_;  // ')'
                long long m = 1;
                if (pos_ < s_.size() && s_[pos_] == '^') {
                    ++pos_;
                    m = integer();
                }
                append_power(out, body, m);
            } else if (s_.compare(pos_, 2, "FT") == 0) {
                pos_ += 2;
                if (b_ < 2) fail("full twist needs at least 2 strands");
                auto ft = full_twist(b_).letters;
                long long m = 1;
                if (pos_ < s_.size() && s_[pos_] == '^') {
                    ++pos_;
                    m = integer();
                }
                append_power(out, ft, m);
            } else if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
                long long k = integer();
                if (k == 0) fail("generator 0 is not allowed");
                if (std::llabs(k) > b_ - 1) fail("index out of range 1.." + std::to_string(b_ - 1));
                out.push_back({static_cast<int>(std::llabs(k)), k > 0 ? 1 : -1});
                if (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ')' &&
                    s_[pos_] != '(')
                    fail("malformed token");
            } else {
                fail("malformed token");
            }
        }
    }
};

}  // namespace

BraidWord::BraidWord(int b, std::vector<Letter> ls) : strands(b), letters(std::move(ls)) { check_word(*this); }

int BraidWord::n_plus() const {
    return static_cast<int>(std::count_if(letters.begin(), letters.end(), [](const Letter& l) { return l.sign > 0; }));
}

int BraidWord::n_minus() const { return static_cast<int>(letters.size()) - n_plus(); }

std::string BraidWord::str() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < letters.size(); ++k) {
        if (k) os << ' ';
        os << letters[k].sign * letters[k].index;
    }
    return os.str();
}

BraidWord parse_braid(const std::string& text, int strands) {
    if (strands < 1) throw BraidParseError("strand count must be positive");
    Parser p(text, strands);
    return BraidWord(strands, p.run());
}

int writhe(const BraidWord& w) { return w.n_plus() - w.n_minus(); }

int self_linking(const BraidWord& w) { return -w.strands + writhe(w); }

BraidWord full_twist(int n) {
    if (n < 2) throw std::invalid_argument("full twist needs n >= 2");
    std::vector<Letter> ls;
    for (int r = 0; r < n; ++r)
        for (int i = 1; i < n; ++i) ls.push_back({i, 1});
    return BraidWord(n, std::move(ls));
}

BraidWord sub_full_twist(int a, int i, int sign, int strands) {
    if (a < 2 || i < 1 || i + a - 2 > strands - 1 || (sign != 1 && sign != -1))
        throw std::invalid_argument("sub full twist parameters out of range");
    std::vector<Letter> ls;
    for (int r = 0; r < a; ++r)
        for (int t = i; t <= i + a - 2; ++t) ls.push_back({t, sign});
    return BraidWord(strands, std::move(ls));
}

BraidWord concat(const BraidWord& x, const BraidWord& y) {
    BraidWord out = x;
    out.strands = std::max(x.strands, y.strands);
    out.letters.insert(out.letters.end(), y.letters.begin(), y.letters.end());
    return out;
}

BraidWord inverse(const BraidWord& w) {
    BraidWord out;
    out.strands = w.strands;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back({it->index, -it->sign});
    return out;
}

BraidWord power(const BraidWord& w, int k) {
    BraidWord base = k < 0 ? inverse(w) : w;
    BraidWord out;
    out.strands = w.strands;
    for (int r = 0; r < std::abs(k); ++r) out.letters.insert(out.letters.end(), base.letters.begin(), base.letters.end());
    return out;
}

BraidWord free_reduce(const BraidWord& w) {
    BraidWord out;
    out.strands = w.strands;
    for (const Letter& l : w.letters) {
        if (!out.letters.empty() && out.letters.back().index == l.index && out.letters.back().sign == -l.sign)
            out.letters.pop_back();
        else
            out.letters.push_back(l);
    }
    return out;
}

BraidWord conjugate(const BraidWord& w, Letter g) {
    if (g.index < 1 || g.index > w.strands - 1) throw std::invalid_argument("conjugating letter out of range");
    BraidWord out;
    out.strands = w.strands;
    out.letters.push_back(g);
    out.letters.insert(out.letters.end(), w.letters.begin(), w.letters.end());
    out.letters.push_back({g.index, -g.sign});
    return out;
}

BraidWord stabilize_pos(const BraidWord& w) {
    BraidWord out = w;
    out.strands = w.strands + 1;
    out.letters.push_back({w.strands, 1});
    return out;
}

BraidWord stabilize_neg(const BraidWord& w) {
    BraidWord out = w;
    out.strands = w.strands + 1;
    out.letters.push_back({w.strands, -1});
    return out;
}

std::optional<BraidWord> destabilize(const BraidWord& w) {
    if (w.strands < 2) return std::nullopt;
    int top = w.strands - 1;
    int count = 0;
    std::size_t where = 0;
    for (std::size_t k = 0; k < w.letters.size(); ++k) {
        if (w.letters[k].index == top) {
            ++count;
            where = k;
        }
    }
    if (count != 1) return std::nullopt;
    BraidWord out;
    out.strands = w.strands - 1;
    out.letters = w.letters;
    out.letters.erase(out.letters.begin() + static_cast<std::ptrdiff_t>(where));
    return out;
}

std::vector<int> permutation(const BraidWord& w) {
    // pos[p]: current position of the strand that started at p
    std::vector<int> at(static_cast<std::size_t>(w.strands));
    std::iota(at.begin(), at.end(), 0);  // at[position] = starting strand
    for (const Letter& l : w.letters) std::swap(at[l.index - 1], at[l.index]);
    std::vector<int> perm(at.size());
    for (std::size_t q = 0; q < at.size(); ++q) perm[at[q]] = static_cast<int>(q);
    return perm;
}

int closure_components(const BraidWord& w) {
    auto perm = permutation(w);
    std::vector<char> seen(perm.size(), 0);
    int cycles = 0;
    for (std::size_t p = 0; p < perm.size(); ++p) {
        if (seen[p]) continue;
        ++cycles;
        for (std::size_t q = p; !seen[q]; q = static_cast<std::size_t>(perm[q])) seen[q] = 1;
    }
    return cycles;
}

std::string canonical_key(const BraidWord& w) {
    return std::to_string(w.strands) + ":" + free_reduce(w).str();
}

BraidWord FamilyTemplate::instantiate(int k) const { return concat(base, power(insert, k)); }

}  // namespace tkh
