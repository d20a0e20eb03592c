#include "qwp/qwp2d.hpp"

#include "qwp/parallel.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace qwp {
namespace {

struct Children {
    // [vertical branch][horizontal branch], 0 = low, 1 = high
    std::array<std::array<ComplexGrid, 2>, 2> parts;
};

// Separable split: horizontal pass over rows, then vertical pass over columns.
Children split2d(const ComplexGrid& block, const SpectralFilterPair& vertical,
                 const SpectralFilterPair& horizontal, bool parallel_lines) {
    const std::size_t s = block.rows();
    const std::size_t h = s / 2;
    std::array<ComplexGrid, 2> half{ComplexGrid(s, h), ComplexGrid(s, h)};

    auto row_pass = [&](std::size_t r) {
        ComplexVec lo(h), hi(h);
        split_block(block.row(r), horizontal, lo, hi);
        std::copy(lo.begin(), lo.end(), half[0].row(r).begin());
        std::copy(hi.begin(), hi.end(), half[1].row(r).begin());
    };

    Children out;
    for (auto& v : out.parts)
        for (auto& g : v) g = ComplexGrid(h, h);

    auto col_pass = [&](std::size_t idx) {
        const std::size_t hb = idx / h;
        const std::size_t c = idx % h;
        ComplexVec col(s), lo(h), hi(h);
        for (std::size_t r = 0; r < s; ++r) col[r] = half[hb](r, c);
        split_block(col, vertical, lo, hi);
        for (std::size_t r = 0; r < h; ++r) {
            out.parts[0][hb](r, c) = lo[r];
            out.parts[1][hb](r, c) = hi[r];
        }
    };

    if (parallel_lines) {
        parallel_for(s, row_pass);
        parallel_for(2 * h, col_pass);
    } else {
        for (std::size_t r = 0; r < s; ++r) row_pass(r);
        for (std::size_t i = 0; i < 2 * h; ++i) col_pass(i);
    }
    return out;
}

ComplexGrid merge2d(const std::array<std::array<const ComplexGrid*, 2>, 2>& parts,
                    const SpectralFilterPair& vertical, const SpectralFilterPair& horizontal,
                    bool parallel_lines) {
    const std::size_t h = parts[0][0]->rows();
    const std::size_t s = 2 * h;
    std::array<ComplexGrid, 2> half{ComplexGrid(s, h), ComplexGrid(s, h)};

    auto col_pass = [&](std::size_t idx) {
        const std::size_t hb = idx / h;
        const std::size_t c = idx % h;
        ComplexVec lo(h), hi(h), col(s);
        for (std::size_t r = 0; r < h; ++r) {
            lo[r] = (*parts[0][hb])(r, c);
            hi[r] = (*parts[1][hb])(r, c);
        }
        merge_block(lo, hi, vertical, col);
        for (std::size_t r = 0; r < s; ++r) half[hb](r, c) = col[r];
    };

    ComplexGrid out(s, s);
    auto row_pass = [&](std::size_t r) { merge_block(half[0].row(r), half[1].row(r), horizontal, out.row(r)); };

    if (parallel_lines) {
        parallel_for(2 * h, col_pass);
        parallel_for(s, row_pass);
    } else {
        for (std::size_t i = 0; i < 2 * h; ++i) col_pass(i);
        for (std::size_t r = 0; r < s; ++r) row_pass(r);
    }
    return out;
}

ComplexGrid to_complex(const ImageGrid& x) {
    ComplexGrid out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = x.data()[i];
    return out;
}

LevelSet first_level(const ComplexGrid& image, int spline_order, Sign sign) {
    const std::size_t n = image.rows();
    const SpectralFilterPair vertical = first_level_bank(spline_order, n, Sign::plus);
    const SpectralFilterPair horizontal = first_level_bank(spline_order, n, sign);
    Children ch = split2d(image, vertical, horizontal, true);
    LevelSet set;
    set.level = 1;
    set.sign = sign;
    set.block_size = n / 2;
    set.blocks.resize(4);
    const auto [vlo, vhi] = child_bands(0);
    const auto [hlo, hhi] = child_bands(0);
    const std::array<int, 2> vb{vlo, vhi};
    const std::array<int, 2> hb{hlo, hhi};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) set.at(vb[a], hb[b]) = std::move(ch.parts[a][b]);
    return set;
}

LevelSet next_level(const LevelSet& parent, int spline_order) {
    const int m = parent.level + 1;
    const SpectralFilterPair bank = level_filters(spline_order, parent.block_size, m);
    LevelSet set;
    set.level = m;
    set.sign = parent.sign;
    set.block_size = parent.block_size / 2;
    set.blocks.resize(std::size_t{1} << (2 * m));
    const int pb = static_cast<int>(parent.bands());
    const bool few = parent.blocks.size() < thread_count();

    auto work = [&](std::size_t idx) {
        const int j = static_cast<int>(idx) / pb;
        const int l = static_cast<int>(idx) % pb;
        Children ch = split2d(parent.at(j, l), bank, bank, few);
        const auto [vlo, vhi] = child_bands(j);
        const auto [hlo, hhi] = child_bands(l);
        const std::array<int, 2> vb{vlo, vhi};
        const std::array<int, 2> hb{hlo, hhi};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) set.at(vb[a], hb[b]) = std::move(ch.parts[a][b]);
    };
    if (few) {
        for (std::size_t i = 0; i < parent.blocks.size(); ++i) work(i);
    } else {
        parallel_for(parent.blocks.size(), work);
    }
    return set;
}

}  // namespace

void LevelSet::validate(std::size_t source_size) const {
    const std::size_t expected_blocks = std::size_t{1} << (2 * level);
    if (blocks.size() != expected_blocks) {
        throw invalid_state("level " + std::to_string(level) + ": expected " + std::to_string(expected_blocks) +
                            " blocks, found " + std::to_string(blocks.size()));
    }
    const std::size_t side = source_size >> level;
    if (block_size != side) throw invalid_state("level " + std::to_string(level) + ": wrong block size");
    for (const auto& b : blocks) {
        if (b.rows() != side || b.cols() != side) {
            throw invalid_state("level " + std::to_string(level) + ": block with wrong dimensions");
        }
    }
}

bool QwpDecomposition::has_level(int m) const {
    return m >= 1 && static_cast<std::size_t>(m) <= plus.size() && static_cast<std::size_t>(m) <= minus.size();
}

const LevelSet& QwpDecomposition::level(Sign s, int m) const {
    if (!has_level(m)) throw invalid_state("decomposition has no level " + std::to_string(m));
    return (s == Sign::plus ? plus : minus)[static_cast<std::size_t>(m) - 1];
}

LevelSet& QwpDecomposition::level(Sign s, int m) {
    if (!has_level(m)) throw invalid_state("decomposition has no level " + std::to_string(m));
    return (s == Sign::plus ? plus : minus)[static_cast<std::size_t>(m) - 1];
}

CoeffBlock QwpDecomposition::block(Sign s, int m, int j, int l) const {
    return {level(s, m).at(j, l), m, j, l, s};
}

QwpDecomposition qwp2d_analysis(const ImageGrid& x, int spline_order, int max_level) {
    if (!x.is_square()) throw std::invalid_argument("qwp2d_analysis: image must be square");
    if (max_level < 1) throw std::invalid_argument("qwp2d_analysis: max_level must be >= 1");
    check_decomposable(x.rows(), max_level, "qwp2d_analysis");

    QwpDecomposition d;
    d.spline_order = spline_order;
    d.size = x.rows();
    d.max_level = max_level;
    const ComplexGrid image = to_complex(x);
    for (Sign s : {Sign::plus, Sign::minus}) {
        auto& sets = (s == Sign::plus) ? d.plus : d.minus;
        sets.push_back(first_level(image, spline_order, s));
        for (int m = 2; m <= max_level; ++m) sets.push_back(next_level(sets.back(), spline_order));
    }
    return d;
}

ComplexGrid synthesize_complex(const LevelSet& set, int spline_order, std::size_t size) {
    set.validate(size);
    std::vector<ComplexGrid> current = set.blocks;
    for (int m = set.level; m >= 2; --m) {
        const std::size_t child_bands_count = std::size_t{1} << m;
        const std::size_t parent_bands = child_bands_count / 2;
        const std::size_t side = current.front().rows() * 2;
        const SpectralFilterPair bank = level_filters(spline_order, side, m);
        std::vector<ComplexGrid> next(parent_bands * parent_bands);
        const bool few = next.size() < thread_count();
        auto work = [&](std::size_t idx) {
            const int j = static_cast<int>(idx / parent_bands);
            const int l = static_cast<int>(idx % parent_bands);
            const auto [vlo, vhi] = child_bands(j);
            const auto [hlo, hhi] = child_bands(l);
            auto child = [&](int a, int b) { return &current[static_cast<std::size_t>(a) * child_bands_count + static_cast<std::size_t>(b)]; };
            std::array<std::array<const ComplexGrid*, 2>, 2> parts{
                std::array<const ComplexGrid*, 2>{child(vlo, hlo), child(vlo, hhi)},
                std::array<const ComplexGrid*, 2>{child(vhi, hlo), child(vhi, hhi)}};
            next[idx] = merge2d(parts, bank, bank, few);
        };
        if (few) {
            for (std::size_t i = 0; i < next.size(); ++i) work(i);
        } else {
            parallel_for(next.size(), work);
        }
        current = std::move(next);
    }
    const SpectralFilterPair vertical = first_level_bank(spline_order, size, Sign::plus);
    const SpectralFilterPair horizontal = first_level_bank(spline_order, size, set.sign);
    const auto [lo, hi] = child_bands(0);
    std::array<std::array<const ComplexGrid*, 2>, 2> parts{
        std::array<const ComplexGrid*, 2>{&current[static_cast<std::size_t>(lo) * 2 + static_cast<std::size_t>(lo)],
                                          &current[static_cast<std::size_t>(lo) * 2 + static_cast<std::size_t>(hi)]},
        std::array<const ComplexGrid*, 2>{&current[static_cast<std::size_t>(hi) * 2 + static_cast<std::size_t>(lo)],
                                          &current[static_cast<std::size_t>(hi) * 2 + static_cast<std::size_t>(hi)]}};
    return merge2d(parts, vertical, horizontal, true);
}

ImageGrid combine_frame(const ComplexGrid& x_plus, const ComplexGrid& x_minus) {
    if (!x_plus.same_shape(x_minus)) throw std::invalid_argument("combine_frame: shape mismatch");
    ImageGrid out(x_plus.rows(), x_plus.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = (x_plus.data()[i].real() + x_minus.data()[i].real()) / 8.0;
    }
    return out;
}

ImageGrid synthesize_level(const LevelSet& plus, const LevelSet& minus, int spline_order, std::size_t size) {
    if (plus.sign != Sign::plus || minus.sign != Sign::minus || plus.level != minus.level) {
        throw invalid_state("synthesize_level: expected plus and minus sets of the same level");
    }
    return combine_frame(synthesize_complex(plus, spline_order, size), synthesize_complex(minus, spline_order, size));
}

ImageGrid qwp2d_synthesis(const QwpDecomposition& d, int level) {
    return synthesize_level(d.level(Sign::plus, level), d.level(Sign::minus, level), d.spline_order, d.size);
}

ComplexGrid qwp2d_waveform(int spline_order, std::size_t n, int level, int j, int l, Sign sign) {
    const int bands = 1 << level;
    if (j < 0 || j >= bands || l < 0 || l >= bands) {
        throw std::invalid_argument("qwp2d_waveform: band index out of range");
    }
    const ComplexVec vertical = qwp_waveform(spline_order, n, level, j, Sign::plus).complex_view();
    const ComplexVec horizontal = qwp_waveform(spline_order, n, level, l, sign).complex_view();
    ComplexGrid out(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t q = 0; q < n; ++q) out(k, q) = vertical[k] * horizontal[q];
    return out;
}

int direction_count(int level) {
    if (level < 1) throw std::invalid_argument("direction_count: level must be >= 1");
    // Orientation of theta_{+-[m],j,l} is the direction of its spectral
    // square, represented by the square's vertex farthest from the origin,
    // (j+1, +-(l+1)) in units of N / 2^(m+1). Collinear vectors share one
    // orientation; the plus and minus sets occupy different quadrant pairs.
    const int bands = 1 << level;
    std::set<std::pair<int, int>> seen;
    for (int sgn : {1, -1}) {
        for (int j = 0; j < bands; ++j) {
            for (int l = 0; l < bands; ++l) {
                const int a = j + 1;
                const int b = l + 1;
                const int g = std::gcd(a, b);
                seen.emplace(a / g, sgn * (b / g));
            }
        }
    }
    return static_cast<int>(seen.size());
}

CoeffBlock coeff_oracle(const ImageGrid& x, int spline_order, int level, int j, int l, Sign sign) {
    if (!x.is_square()) throw std::invalid_argument("coeff_oracle: image must be square");
    const std::size_t n = x.rows();
    check_decomposable(n, level, "coeff_oracle");
    const ComplexGrid w = qwp2d_waveform(spline_order, n, level, j, l, sign);
    const std::size_t side = n >> level;
    const std::size_t step = std::size_t{1} << level;
    CoeffBlock out{ComplexGrid(side, side), level, j, l, sign};
    for (std::size_t k = 0; k < side; ++k) {
        for (std::size_t q = 0; q < side; ++q) {
            cdouble acc = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                const std::size_t wa = (a + n - (step * k) % n) % n;
                for (std::size_t b = 0; b < n; ++b) {
                    const std::size_t wb = (b + n - (step * q) % n) % n;
                    acc += x(a, b) * std::conj(w(wa, wb));
                }
            }
            out.values(k, q) = acc;
        }
    }
    return out;
}

// ---- dump ------------------------------------------------------------------

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    os.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return std::bit_cast<double>(v);
}

std::ofstream open_dump(const std::filesystem::path& path, std::size_t rows, std::size_t cols, std::uint32_t flags) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open dump file for writing: " + path.string());
    os.write("QWP2", 4);
    put_u32(os, static_cast<std::uint32_t>(rows));
    put_u32(os, static_cast<std::uint32_t>(cols));
    put_u32(os, flags);
    return os;
}

}  // namespace

void write_dump(const std::filesystem::path& path, const ComplexGrid& values) {
    auto os = open_dump(path, values.rows(), values.cols(), kDumpComplexFlag);
    for (const auto& v : values.data()) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw std::runtime_error("failed writing dump file: " + path.string());
}

void write_dump(const std::filesystem::path& path, const ImageGrid& values) {
    auto os = open_dump(path, values.rows(), values.cols(), 0);
    for (double v : values.data()) put_f64(os, v);
    if (!os) throw std::runtime_error("failed writing dump file: " + path.string());
}

DumpContents read_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open dump file: " + path.string());
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || std::memcmp(magic.data(), "QWP2", 4) != 0) {
        throw std::runtime_error("not a QWP2 dump: " + path.string());
    }
    DumpContents d;
    d.rows = get_u32(is);
    d.cols = get_u32(is);
    d.flags = get_u32(is);
    const std::size_t count = std::size_t{d.rows} * d.cols * ((d.flags & kDumpComplexFlag) ? 2 : 1);
    d.samples.resize(count);
    for (auto& v : d.samples) v = get_f64(is);
    if (!is) throw std::runtime_error("truncated dump file: " + path.string());
    return d;
}

}  // namespace qwp
