#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tkh {

struct Letter {
    int index = 1;  // generator sigma_index, 1-based
    int sign = 1;   // +1 or -1
    bool operator==(const Letter&) const = default;
};

struct BraidWord {
    int strands = 1;
    std::vector<Letter> letters;

    BraidWord() = default;
    BraidWord(int b, std::vector<Letter> ls);

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    int n_plus() const;
    int n_minus() const;
    std::string str() const;  // grammar-compatible token string
    bool operator==(const BraidWord&) const = default;
};

class BraidParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

BraidWord parse_braid(const std::string& text, int strands);

int writhe(const BraidWord& w);
int self_linking(const BraidWord& w);

BraidWord full_twist(int n);
BraidWord sub_full_twist(int a, int i, int sign, int strands);
inline BraidWord sub_full_twist(int a, int i, int sign) { return sub_full_twist(a, i, sign, i + a - 1); }

BraidWord concat(const BraidWord& x, const BraidWord& y);
BraidWord power(const BraidWord& w, int k);  // negative k uses the inverse
BraidWord inverse(const BraidWord& w);
BraidWord free_reduce(const BraidWord& w);
BraidWord conjugate(const BraidWord& w, Letter g);  // g w g^-1
BraidWord stabilize_pos(const BraidWord& w);
BraidWord stabilize_neg(const BraidWord& w);
std::optional<BraidWord> destabilize(const BraidWord& w);

// permutation[p] = bottom position reached by the strand starting at top position p (0-based)
std::vector<int> permutation(const BraidWord& w);
int closure_components(const BraidWord& w);

// Strand count plus letters after free reduction.
std::string canonical_key(const BraidWord& w);

struct FamilyTemplate {
    BraidWord base;
    BraidWord insert;
    int k_min = 0;
    int k_max = 0;

    BraidWord instantiate(int k) const;  // base * insert^k
};

}  // namespace tkh
