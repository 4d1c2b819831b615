#include "ctix/bitseq.hpp"

#include <stdexcept>

#include "ctix/kernels.hpp"

namespace ctix {

BitSequence BitBuilder::build() && {
    return BitSequence(std::move(words_), n_);
}

BitSequence::BitSequence(std::vector<uint64_t> words, size_t nbits)
    : words_(std::move(words)), nbits_(nbits) {
    size_t need = (nbits_ + 63) / 64;
    if (words_.size() < need) throw std::invalid_argument("word buffer shorter than bit count");
    words_.resize(need);
    // Mask tail bits so popcounts and serialization see a canonical buffer.
    if (nbits_ % 64 != 0 && !words_.empty())
        words_.back() &= (uint64_t(1) << (nbits_ % 64)) - 1;
    build_directory();
}

void BitSequence::build_directory() {
    size_t nblocks = (words_.size() + kBlockWords - 1) / kBlockWords;
    super_.assign(nblocks + 1, 0);
    if (nblocks > 0) {
        std::vector<uint64_t> counts(nblocks);
        kernels::block_popcounts(words_.data(), words_.size(), kBlockWords, counts.data());
        for (size_t i = 0; i < nblocks; ++i) super_[i + 1] = super_[i] + counts[i];
    }
    ones_ = super_.empty() ? 0 : super_.back();
}

bool BitSequence::access(size_t p) const {
    if (p >= nbits_) throw std::out_of_range("bit position out of range");
    return (words_[p / 64] >> (p % 64)) & 1;
}

uint64_t BitSequence::prefix_ones(size_t p) const {
    if (p > nbits_) throw std::out_of_range("bit position out of range");
    size_t w = p / 64;
    size_t block = w / kBlockWords;
    uint64_t acc = super_[block];
    for (size_t i = block * kBlockWords; i < w; ++i) acc += uint64_t(__builtin_popcountll(words_[i]));
    size_t rem = p % 64;
    if (rem != 0) acc += uint64_t(__builtin_popcountll(words_[w] & ((uint64_t(1) << rem) - 1)));
    return acc;
}

uint64_t BitSequence::rank(bool b, size_t p) const {
    if (p >= nbits_) throw std::out_of_range("rank position out of range");
    uint64_t ones = prefix_ones(p + 1);
    return b ? ones : (p + 1) - ones;
}

namespace {

// Position of the n-th (1-based) set bit of w; n <= popcount(w).
int select_in_word(uint64_t w, uint64_t n) {
    for (int byte = 0; byte < 8; ++byte) {
        uint64_t chunk = (w >> (8 * byte)) & 0xff;
        uint64_t c = uint64_t(__builtin_popcountll(chunk));
        if (n <= c) {
            int bit = 8 * byte;
            while (true) {
                if (chunk & 1) {
                    if (--n == 0) return bit;
                }
                chunk >>= 1;
                ++bit;
            }
        }
        n -= c;
    }
    return -1;  // unreachable for valid n
}

}  // namespace

int64_t BitSequence::select(bool b, uint64_t n) const {
    if (n == 0) return -1;
    if (n > count(b)) throw std::out_of_range("select argument exceeds population");

    // Directory entries are monotone in both ones and zeros, so the same
    // binary search works for either bit once translated.
    size_t lo = 0, hi = super_.size() - 1;  // block index range; super_[i] = ones before block i
    while (lo + 1 < hi) {
        size_t mid = (lo + hi) / 2;
        uint64_t before = b ? super_[mid] : uint64_t(mid * kBlockWords * 64) - super_[mid];
        if (before < n) lo = mid;
        else hi = mid;
    }
    uint64_t acc = b ? super_[lo] : uint64_t(lo * kBlockWords * 64) - super_[lo];
    uint64_t need = n - acc;
    size_t wend = words_.size();
    for (size_t w = lo * kBlockWords; w < wend; ++w) {
        uint64_t word = b ? words_[w] : ~words_[w];
        uint64_t c = uint64_t(__builtin_popcountll(word));
        if (need <= c) return int64_t(w * 64) + select_in_word(word, need);
        need -= c;
    }
    throw std::out_of_range("select argument exceeds population");
}

void BitSequence::save(io::Writer& w) const {
    w.u64(nbits_);
    size_t nbytes = (nbits_ + 7) / 8;
    for (size_t i = 0; i < nbytes; ++i)
        w.u8(uint8_t(words_[i / 8] >> (8 * (i % 8))));
}

BitSequence BitSequence::load(io::Reader& r) {
    uint64_t nbits = r.u64();
    size_t nbytes = size_t((nbits + 7) / 8);
    std::vector<uint64_t> words((nbits + 63) / 64, 0);
    for (size_t i = 0; i < nbytes; ++i)
        words[i / 8] |= uint64_t(r.u8()) << (8 * (i % 8));
    return BitSequence(std::move(words), size_t(nbits));
}

uint64_t BitSequence::bytes() const {
    return words_.size() * 8 + super_.size() * 8;
}

}  // namespace ctix
