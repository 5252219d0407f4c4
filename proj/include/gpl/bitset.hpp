#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace gpl {

// Fixed-universe bitset with value semantics; used for states (atom sets)
// and concept denotations (object sets).
class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    size_t size() const { return nbits_; }
    void set(size_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
    void reset(size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    size_t count() const {
        size_t n = 0;
        for (uint64_t w : words_) n += static_cast<size_t>(__builtin_popcountll(w));
        return n;
    }
    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool contains(const Bitset& other) const {  // other subseteq this
        for (size_t i = 0; i < words_.size(); ++i)
            if (other.words_[i] & ~words_[i]) return false;
        return true;
    }

    Bitset& operator|=(const Bitset& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    Bitset& subtract(const Bitset& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    void flip_all() {
        for (uint64_t& w : words_) w = ~w;
        trim();
    }

    bool operator==(const Bitset& o) const { return nbits_ == o.nbits_ && words_ == o.words_; }
    bool operator!=(const Bitset& o) const { return !(*this == o); }
    bool operator<(const Bitset& o) const { return words_ < o.words_; }

    template <class F>
    void for_each(F&& f) const {
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            uint64_t w = words_[wi];
            while (w) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
                f(wi * 64 + b);
                w &= w - 1;
            }
        }
    }

    size_t hash() const {
        size_t h = 0x9e3779b97f4a7c15ull;
        for (uint64_t w : words_) h = (h ^ w) * 0x100000001b3ull;
        return h;
    }

    const std::vector<uint64_t>& words() const { return words_; }

  private:
    void trim() {
        if (nbits_ % 64 != 0 && !words_.empty())
            words_.back() &= (uint64_t{1} << (nbits_ % 64)) - 1;
    }

    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

struct BitsetHash {
    size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace gpl
