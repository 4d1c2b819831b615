#include "ctix/scdc.hpp"

#include <algorithm>

namespace ctix::scdc {

namespace {
thread_local uint64_t g_decoded = 0;
}

uint64_t decoded_symbols() { return g_decoded; }
void reset_decoded_symbols() { g_decoded = 0; }

FrequencyModel FrequencyModel::from_frequencies(const std::vector<uint64_t>& freq_by_symbol) {
    std::vector<uint32_t> order;
    for (uint32_t s = 0; s < freq_by_symbol.size(); ++s)
        if (freq_by_symbol[s] > 0) order.push_back(s);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (freq_by_symbol[a] != freq_by_symbol[b]) return freq_by_symbol[a] > freq_by_symbol[b];
        return a < b;
    });

    FrequencyModel m;
    m.rank_to_symbol_ = std::move(order);
    m.symbol_to_rank_.assign(freq_by_symbol.size(), kNoRank);
    m.freq_by_rank_.resize(m.rank_to_symbol_.size());
    for (uint32_t r = 0; r < m.rank_to_symbol_.size(); ++r) {
        m.symbol_to_rank_[m.rank_to_symbol_[r]] = r;
        m.freq_by_rank_[r] = freq_by_symbol[m.rank_to_symbol_[r]];
    }
    return m;
}

uint32_t FrequencyModel::rank_of(uint32_t symbol) const {
    if (!contains(symbol)) throw VocabularyError("symbol not in model");
    return symbol_to_rank_[symbol];
}

uint32_t FrequencyModel::symbol_at(uint32_t rank) const {
    if (rank >= rank_to_symbol_.size()) throw VocabularyError("rank beyond vocabulary");
    return rank_to_symbol_[rank];
}

uint32_t codeword_length(const Params& p, uint64_t rank) {
    validate(p);
    uint64_t base = 0, width = p.s;
    uint32_t j = 1;
    while (rank >= base + width) {
        base += width;
        width *= p.c;
        ++j;
    }
    return j;
}

uint64_t encoded_bytes(const Params& p, const std::vector<uint64_t>& freq_by_rank) {
    validate(p);
    // Prefix sums let each length window contribute in one subtraction.
    const size_t V = freq_by_rank.size();
    uint64_t total = 0;
    std::vector<uint64_t> prefix(V + 1, 0);
    for (size_t i = 0; i < V; ++i) prefix[i + 1] = prefix[i] + freq_by_rank[i];

    uint64_t lo = 0, width = p.s;
    uint32_t j = 1;
    while (lo < V) {
        uint64_t hi = std::min<uint64_t>(V, lo + width);
        total += uint64_t(j) * (prefix[hi] - prefix[lo]);
        lo = hi;
        width *= p.c;
        ++j;
    }
    return total;
}

Params choose_optimal_s(const std::vector<uint64_t>& freq_by_rank) {
    uint16_t best_s = 1;
    uint64_t best = UINT64_MAX;
    for (uint16_t s = 1; s <= 255; ++s) {
        Params p{s, uint16_t(256 - s)};
        uint64_t t = encoded_bytes(p, freq_by_rank);
        if (t < best) {
            best = t;
            best_s = s;
        }
    }
    return {best_s, uint16_t(256 - best_s)};
}

void encode_symbol(const FrequencyModel& m, const Params& p, uint32_t symbol,
                   std::vector<uint8_t>& out) {
    uint64_t rank = m.rank_of(symbol);
    uint64_t base = 0, width = p.s;
    uint32_t j = 1;
    while (rank >= base + width) {
        base += width;
        width *= p.c;
        ++j;
    }
    uint64_t x = rank - base;
    size_t at = out.size();
    out.resize(at + j);
    out[at + j - 1] = uint8_t(x % p.s);
    uint64_t v = x / p.s;
    for (size_t pos = at + j - 1; pos-- > at;) {
        out[pos] = uint8_t(v % p.c + p.s);
        v /= p.c;
    }
}

std::vector<uint8_t> encode_stream(const FrequencyModel& m, const Params& p,
                                   const std::vector<uint32_t>& symbols) {
    validate(p);
    std::vector<uint8_t> out;
    for (uint32_t s : symbols) encode_symbol(m, p, s, out);
    return out;
}

namespace {

// Parses one codeword in [p, end); advances p past it. Returns the rank.
inline uint64_t parse_codeword(const uint8_t*& p, const uint8_t* end, const Params& params,
                               uint64_t limit) {
    uint64_t v = 0, base = 0, mult = params.s;
    while (true) {
        if (p == end) throw CorruptFile("truncated codeword");
        uint8_t b = *p++;
        if (b < params.s) {
            uint64_t rank = base + v * params.s + b;
            if (rank >= limit) throw CorruptFile("codeword rank beyond vocabulary");
            return rank;
        }
        v = v * params.c + (b - params.s);
        base += mult;
        mult *= params.c;
        if (base > limit || v > limit) throw CorruptFile("codeword overruns vocabulary");
    }
}

}  // namespace

StreamDecoder::StreamDecoder(const uint8_t* begin, const uint8_t* end, const FrequencyModel& m,
                             const Params& p)
    : p_(begin), end_(end), model_(&m), params_(p) {
    validate(p);
}

uint32_t StreamDecoder::next() {
    uint64_t rank = parse_codeword(p_, end_, params_, model_->vocabulary());
    ++g_decoded;
    return model_->symbol_at(uint32_t(rank));
}

void StreamDecoder::skip_to(const uint8_t* pos) {
    if (pos < p_ || pos > end_) throw std::out_of_range("skip target outside stream");
    p_ = pos;
}

ReverseStreamDecoder::ReverseStreamDecoder(const uint8_t* begin, const uint8_t* end,
                                           const FrequencyModel& m, const Params& p)
    : begin_(begin), p_(end), model_(&m), params_(p) {
    validate(p);
}

uint32_t ReverseStreamDecoder::prev() {
    if (p_ == begin_) throw CorruptFile("reverse decode past stream start");
    if (*(p_ - 1) >= params_.s) throw CorruptFile("stream does not end on a stopper");
    const uint8_t* start = p_ - 1;
    while (start != begin_ && *(start - 1) >= params_.s) --start;
    const uint8_t* q = start;
    uint64_t rank = parse_codeword(q, p_, params_, model_->vocabulary());
    p_ = start;
    ++g_decoded;
    return model_->symbol_at(uint32_t(rank));
}

std::vector<uint32_t> decode_stream_from(const uint8_t* bytes, size_t len, size_t offset,
                                         size_t count, const FrequencyModel& m, const Params& p) {
    if (offset > len) throw std::out_of_range("offset beyond stream");
    StreamDecoder d(bytes + offset, bytes + len, m, p);
    std::vector<uint32_t> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(d.next());
    return out;
}

void save_model(io::Writer& w, const FrequencyModel& m, const Params& p) {
    w.u64(m.vocabulary());
    for (size_t r = 0; r < m.vocabulary(); ++r) w.u64(m.symbol_at(uint32_t(r)));
    w.u8(uint8_t(p.s));
}

std::pair<FrequencyModel, Params> load_model(io::Reader& r) {
    uint64_t v = r.u64();
    std::vector<uint64_t> symbols(static_cast<size_t>(v));
    uint64_t max_sym = 0;
    for (auto& s : symbols) {
        s = r.u64();
        max_sym = std::max(max_sym, s);
    }
    uint8_t s_byte = r.u8();
    if (s_byte < 1) throw CorruptFile("dense code split out of range");
    if (v > 0 && max_sym >= UINT32_MAX) throw CorruptFile("symbol out of range");

    std::vector<uint64_t> freq(size_t(v ? max_sym + 1 : 0), 0);
    // Reconstruct rank order through synthetic frequencies: rank i gets a
    // strictly larger count than rank i+1, so from_frequencies reproduces the
    // serialized order exactly.
    for (size_t i = 0; i < symbols.size(); ++i) freq[size_t(symbols[i])] = v - i + 1;
    FrequencyModel m = FrequencyModel::from_frequencies(freq);
    for (size_t i = 0; i < symbols.size(); ++i)
        if (m.symbol_at(uint32_t(i)) != symbols[i]) throw CorruptFile("model rank table corrupt");
    Params p{uint16_t(s_byte), uint16_t(256 - s_byte)};
    return {m, p};
}

}  // namespace ctix::scdc
