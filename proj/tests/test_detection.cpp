#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "onebit/channel.hpp"
#include "onebit/detection.hpp"
#include "onebit/gaussian.hpp"
#include "onebit/lifting.hpp"
#include "onebit/testing/oracles.hpp"

using namespace onebit;
using onebit::testing::BruteForceResult;

namespace {

const Constellation qpsk = Constellation::qpsk();

RealVector soft_pair(Complex s) {
    RealVector v(2);
    v << s.real(), s.imag();
    return v;
}

RowMatrix lifted_channel(int n, int k, Rng& rng) {
    return block_lift(gen_iid_channel(n, k, rng).H);
}

SymbolVector random_symbols(int k, int m, Rng& rng) {
    SymbolVector v(static_cast<std::size_t>(k));
    for (auto& s : v) {
        s = rng.uniform_index(m);
    }
    return v;
}

RealVector observe(const RowMatrix& rows, const RealVector& x, double rho, Rng& rng, bool noiseless = false) {
    RealVector y = rows * x;
    const double sd = std::sqrt(0.5 / rho);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] = sign_of(noiseless ? y[i] : y[i] + sd * rng.gaussian());
    }
    return y;
}

bool contains(const std::vector<SymbolVector>& set, const SymbolVector& v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

} // namespace

TEST_CASE("log Phi stays finite and monotone far into the tail") {
    double prev = -std::numeric_limits<double>::infinity();
    for (double t = -60.0; t <= 8.0; t += 0.25) {
        const double v = log_normal_cdf(t);
        CHECK(std::isfinite(v));
        CHECK(v > prev);
        prev = v;
    }
    for (double t : {-7.5, -3.0, 0.0, 2.0}) {
        CHECK(log_normal_cdf(t) == doctest::Approx(static_cast<double>(onebit::testing::exact_log_normal_cdf(t))).epsilon(1e-12));
    }
    CHECK(log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("slicing picks the nearest QPSK point") {
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(symbol_decide(soft_pair(Complex(0.9, 0.8) * r), qpsk) == SymbolVector{qpsk.slice(Complex(r, r))});
    CHECK(qpsk.point(symbol_decide(soft_pair(Complex(0.9, 0.8) * r), qpsk)[0]) == Complex(r, r));
    for (int i = 0; i < 4; ++i) {
        CHECK(symbol_decide(soft_pair(qpsk.point(i)), qpsk)[0] == i);
    }
}

TEST_CASE("slicing ties at the origin go to the first point") {
    CHECK(symbol_decide(soft_pair(Complex(0.0, 0.0)), qpsk)[0] == 0);
    const Constellation qam = Constellation::qam16();
    CHECK(symbol_decide(soft_pair(Complex(0.0, 0.0)), qam)[0] == qam.slice(Complex(0.0, 0.0)));
}

TEST_CASE("slicing pairs entry k with entry k + K") {
    RealVector soft(4);
    const double r = 1.0 / std::sqrt(2.0);
    soft << r, -r, -r, r;   // user 0: (r, -r), user 1: (-r, r)
    const SymbolVector v = symbol_decide(soft, qpsk);
    CHECK(qpsk.point(v[0]) == Complex(r, -r));
    CHECK(qpsk.point(v[1]) == Complex(-r, r));
    CHECK(lift_symbols(v, qpsk) == soft);
}

TEST_CASE("gamma schedule") {
    CHECK(gamma_schedule(Snr::from_db(5.0), Modulation::qpsk) == doctest::Approx(2.0));
    CHECK(gamma_schedule(Snr::from_db(30.0), Modulation::qpsk) == doctest::Approx(3.0));
    CHECK(gamma_schedule(Snr::from_db(0.0), Modulation::qam16) == doctest::Approx(1.3));
    CHECK(gamma_schedule(Snr::from_db(10.0), Modulation::qam16) == doctest::Approx(1.5));
    CHECK(gamma_schedule(Snr::from_db(0.0), Modulation::qpsk) == doctest::Approx(1.5));
}

TEST_CASE("gamma of one keeps only the sliced symbol") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        RealVector soft(6);
        for (Eigen::Index i = 0; i < 6; ++i) {
            soft[i] = rng.gaussian();
        }
        const SymbolVector sliced = symbol_decide(soft, qpsk);
        const CandidateSet c = build_candidates(soft, sliced, 1.0, qpsk);
        CHECK(c.size() == 1);
        CHECK(c.at(0) == sliced);
    }
}

TEST_CASE("a midpoint between two QPSK points keeps both") {
    const double r = 1.0 / std::sqrt(2.0);
    const RealVector soft = soft_pair(Complex(r, 0.0));
    const SymbolVector sliced = symbol_decide(soft, qpsk);
    const CandidateSet c = build_candidates(soft, sliced, 2.5, qpsk);
    const auto& shortlist = c.per_user()[0];
    CHECK(std::count(shortlist.begin(), shortlist.end(), qpsk.slice(Complex(r, r))) == 1);
    CHECK(std::count(shortlist.begin(), shortlist.end(), qpsk.slice(Complex(r, -r))) == 1);
    // the far points sit at ratio sqrt(5) < 2.5 as well
    CHECK(c.size() == 4);
    CHECK(build_candidates(soft, sliced, 2.0, qpsk).size() == 2);
}

TEST_CASE("an exact hit on a symbol gives a singleton shortlist") {
    const RealVector soft = soft_pair(qpsk.point(2));
    CHECK(build_candidates(soft, {2}, 3.0, qpsk).size() == 1);
}

TEST_CASE("candidate sets follow the shortlist ratio and enumerate the product") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + rng.uniform_index(3);
        RealVector soft(2 * k);
        for (Eigen::Index i = 0; i < soft.size(); ++i) {
            soft[i] = rng.gaussian();
        }
        const double gamma = rng.uniform(1.0, 3.0);
        const SymbolVector sliced = symbol_decide(soft, qpsk);
        const CandidateSet c = build_candidates(soft, sliced, gamma, qpsk);
        std::size_t product = 1;
        for (int u = 0; u < k; ++u) {
            const Complex s(soft[u], soft[u + k]);
            const double base = std::abs(s - qpsk.point(sliced[static_cast<std::size_t>(u)]));
            const auto& list = c.per_user()[static_cast<std::size_t>(u)];
            for (int m = 0; m < 4; ++m) {
                const bool expected = m == sliced[static_cast<std::size_t>(u)] || std::abs(s - qpsk.point(m)) / base < gamma;
                CHECK((std::find(list.begin(), list.end(), m) != list.end()) == expected);
            }
            product *= list.size();
        }
        CHECK(c.size() == product);
        CHECK(c.index_of(sliced).has_value());
        for (std::size_t l = 0; l < c.size(); ++l) {
            const SymbolVector v = c.at(l);
            CHECK(c.index_of(v) == l);
            for (int u = 0; u < k; ++u) {
                const auto& list = c.per_user()[static_cast<std::size_t>(u)];
                CHECK(std::find(list.begin(), list.end(), v[static_cast<std::size_t>(u)]) != list.end());
            }
        }
    }
}

TEST_CASE("candidate sets reject gamma below one") {
    const RealVector soft = soft_pair(Complex(0.3, 0.1));
    CHECK_THROWS_AS(build_candidates(soft, symbol_decide(soft, qpsk), 0.9, qpsk), InvalidInput);
}

TEST_CASE("stage one output has power K and flips with the labels") {
    Rng rng(13);
    const Snr snr = Snr::from_db(5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const RowMatrix rows = lifted_channel(16, 3, rng);
        const RealVector y = observe(rows, lift_symbols(random_symbols(3, 4, rng), qpsk), snr.linear(), rng);
        const Stage1Result a = svm_detect_stage1(y, rows);
        REQUIRE_FALSE(a.flagged);
        CHECK(a.soft.squaredNorm() == doctest::Approx(3.0).epsilon(1e-12));
        const Stage1Result b = svm_detect_stage1(-y, rows);
        CHECK((a.soft + b.soft).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("stage one slicing is nearly error free without noise") {
    Rng rng(14);
    long errors = 0, symbols = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const RowMatrix rows = lifted_channel(32, 4, rng);
        const SymbolVector sent = random_symbols(4, 4, rng);
        const RealVector y = observe(rows, lift_symbols(sent, qpsk), Snr::from_db(20.0).linear(), rng);
        const SymbolVector got = symbol_decide(svm_detect_stage1(y, rows).soft, qpsk);
        for (int u = 0; u < 4; ++u) {
            errors += got[static_cast<std::size_t>(u)] != sent[static_cast<std::size_t>(u)];
        }
        symbols += 4;
    }
    MESSAGE("stage-1 symbol error rate at 20 dB: " << double(errors) / double(symbols));
    CHECK(double(errors) / double(symbols) < 1e-3);
}

TEST_CASE("weighted Hamming selection of a singleton returns it") {
    Rng rng(15);
    const RowMatrix rows = lifted_channel(8, 2, rng);
    const RealVector y = observe(rows, lift_symbols({1, 3}, qpsk), 1.0, rng);
    const CandidateSet c({{2}, {0}});
    CHECK(weighted_hamming_select(c, y, rows, Snr::from_db(0.0), {2, 0}, qpsk) == SymbolVector{2, 0});
}

TEST_CASE("a candidate matching every sign is selected") {
    Rng rng(16);
    for (int trial = 0; trial < 50; ++trial) {
        const RowMatrix rows = lifted_channel(8, 2, rng);
        const SymbolVector sent = random_symbols(2, 4, rng);
        const RealVector y = observe(rows, lift_symbols(sent, qpsk), 1.0, rng, true);
        const CandidateSet all({{0, 1, 2, 3}, {0, 1, 2, 3}});
        const SymbolVector other{(sent[0] + 1) % 4, sent[1]};
        const SymbolVector got = weighted_hamming_select(all, y, rows, Snr::from_db(10.0), other, qpsk);
        CHECK(weighted_hamming_distance(y, rows, lift_symbols(got, qpsk), Snr::from_db(10.0), HammingWeights::llr) == 0.0);
        CHECK(weighted_hamming_distance(y, rows, lift_symbols(sent, qpsk), Snr::from_db(10.0), HammingWeights::llr) == 0.0);
    }
}

TEST_CASE("hamming distance weights are nonnegative and count mismatches") {
    Rng rng(17);
    const RowMatrix rows = lifted_channel(8, 2, rng);
    const RealVector x = lift_symbols({0, 1}, qpsk);
    RealVector y = (rows * x).unaryExpr([](double v) { return sign_of(v); });
    CHECK(weighted_hamming_distance(y, rows, x, Snr::from_db(0.0), HammingWeights::unweighted) == 0.0);
    y[0] = -y[0];
    y[3] = -y[3];
    CHECK(weighted_hamming_distance(y, rows, x, Snr::from_db(0.0), HammingWeights::unweighted) == 2.0);
    CHECK(weighted_hamming_distance(y, rows, x, Snr::from_db(0.0), HammingWeights::llr) > 0.0);
}

TEST_CASE("unweighted selection over the full product matches exhaustive minimum Hamming") {
    Rng rng(18);
    const Snr snr = Snr::from_db(5.0);
    TwoStageOptions opts;
    opts.gamma_override = 1e9;
    opts.weights = HammingWeights::unweighted;
    for (int trial = 0; trial < 300; ++trial) {
        const RowMatrix rows = lifted_channel(4, 2, rng);
        const RealVector y = observe(rows, lift_symbols(random_symbols(2, 4, rng), qpsk), snr.linear(), rng);
        const DetectionResult got = detect_vector(y, rows, qpsk, snr, opts);
        REQUIRE(got.candidate_cardinality == 16);
        const BruteForceResult ref = onebit::testing::brute_force_min_hamming(y, rows, snr.linear(), qpsk, false);
        CHECK(contains(ref.best, got.final));
    }
}

TEST_CASE("llr-weighted selection over the full product matches the exhaustive weighted detector") {
    Rng rng(19);
    const Snr snr = Snr::from_db(3.0);
    TwoStageOptions opts;
    opts.gamma_override = 1e9;
    for (int trial = 0; trial < 300; ++trial) {
        const RowMatrix rows = lifted_channel(4, 2, rng);
        const RealVector y = observe(rows, lift_symbols(random_symbols(2, 4, rng), qpsk), snr.linear(), rng);
        const DetectionResult got = detect_vector(y, rows, qpsk, snr, opts);
        const BruteForceResult ref =
            onebit::testing::brute_force_min_hamming(y, rows, snr.linear(), qpsk, true, 1e-9L);
        CHECK(contains(ref.best, got.final));
    }
}

TEST_CASE("two-stage result invariants") {
    Rng rng(20);
    for (const double db : {0.0, 5.0, 10.0}) {
        const Snr snr = Snr::from_db(db);
        for (int trial = 0; trial < 100; ++trial) {
            const RowMatrix rows = lifted_channel(16, 4, rng);
            const RealVector y = observe(rows, lift_symbols(random_symbols(4, 4, rng), qpsk), snr.linear(), rng);
            const DetectionResult r = detect_vector(y, rows, qpsk, snr);
            REQUIRE(r.candidates.has_value());
            CHECK(r.stage1.soft.squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
            CHECK(r.candidates->index_of(r.stage1_hard).has_value());
            CHECK(r.candidates->index_of(r.final).has_value());
            CHECK(r.candidate_cardinality == r.candidates->size());
            const double d_final = weighted_hamming_distance(y, rows, lift_symbols(r.final, qpsk), snr, HammingWeights::llr);
            const double d_stage1 = weighted_hamming_distance(y, rows, lift_symbols(r.stage1_hard, qpsk), snr, HammingWeights::llr);
            CHECK(d_final <= d_stage1);
            if (d_final == d_stage1) {
                CHECK(r.final == r.stage1_hard);
            }
        }
    }
}

TEST_CASE("stage-one-only detection returns the sliced vector") {
    Rng rng(21);
    TwoStageOptions opts;
    opts.second_stage = false;
    const RowMatrix rows = lifted_channel(16, 2, rng);
    const RealVector y = observe(rows, lift_symbols({1, 2}, qpsk), 1.0, rng);
    const DetectionResult r = detect_vector(y, rows, qpsk, Snr::from_db(0.0), opts);
    CHECK(r.final == r.stage1_hard);
    CHECK_FALSE(r.candidates.has_value());
    CHECK(r.candidate_cardinality == 1);
}

TEST_CASE("ML returns the transmitted symbol for a single noiseless user") {
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const RowMatrix rows = lifted_channel(8, 1, rng);
        const SymbolVector sent = random_symbols(1, 4, rng);
        const RealVector y = observe(rows, lift_symbols(sent, qpsk), 1.0, rng, true);
        CHECK(ml_detect(y, rows, Snr::from_db(10.0), qpsk) == sent);
    }
}

TEST_CASE("ML agrees with an independent brute-force likelihood") {
    Rng rng(23);
    const Snr snr = Snr::from_db(10.0);
    int exact = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const RowMatrix rows = lifted_channel(4, 2, rng);
        const RealVector y = observe(rows, lift_symbols(random_symbols(2, 4, rng), qpsk), snr.linear(), rng);
        const SymbolVector got = ml_detect(y, rows, snr, qpsk);
        const BruteForceResult ref = onebit::testing::brute_force_ml(y, rows, snr.linear(), qpsk);
        if (contains(ref.best, got)) {
            ++exact;
            continue;
        }
        // only a near-tie reordered by the tail approximation is tolerated
        const long double score =
            onebit::testing::exact_log_likelihood(y, rows, lift_symbols(got, qpsk), snr.linear());
        CHECK(score >= ref.score - 1e-2L);
    }
    MESSAGE("ML exact agreement: " << exact << " / 1000");
    CHECK(exact >= 990);
}

TEST_CASE("ML depends on the channel and SNR only through sqrt(rho) H") {
    Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        const RowMatrix rows = lifted_channel(6, 2, rng);
        const RealVector y = observe(rows, lift_symbols(random_symbols(2, 4, rng), qpsk), 3.0, rng);
        const double alpha = rng.uniform(0.25, 3.25);
        const SymbolVector a = ml_detect(y, rows, Snr::from_db(5.0), qpsk);
        const RowMatrix scaled = alpha * rows;
        const SymbolVector b = ml_detect(y, scaled, Snr::from_db(5.0 - 20.0 * std::log10(alpha)), qpsk);
        CHECK(a == b);
    }
}

TEST_CASE("ML rejects systems too large to enumerate") {
    Rng rng(25);
    const RowMatrix rows = lifted_channel(8, 4, rng);
    const RealVector y = RealVector::Ones(16);
    CHECK_THROWS_AS(ml_detect(y, rows, Snr::from_db(0.0), qpsk, LogCdfMode::safeguarded, 100), InvalidInput);
}

TEST_CASE("noiseless perfect-CSI block detection recovers every vector") {
    Rng rng(26);
    const int n = 32, k = 4, t = 1000;
    const ComplexMatrix h = gen_iid_channel(n, k, rng).H;
    const ComplexMatrix x = gen_symbols(k, t, qpsk, rng);
    const QuantizedMatrix y = one_bit_quantize(h * x);
    const BlockDetection det = two_stage_detect(y, h, qpsk, Snr::from_db(20.0));
    CHECK(det.symbols(qpsk) == x);
    CHECK(det.flagged == 0);
    CHECK(det.cardinalities.size() == static_cast<std::size_t>(t));
}

TEST_CASE("block cardinalities match per-slot candidate sets and runs are deterministic") {
    Rng rng(27);
    const Snr snr = Snr::from_db(2.0);
    const ComplexMatrix h = gen_iid_channel(16, 3, rng).H;
    const ComplexMatrix x = gen_symbols(3, 40, qpsk, rng);
    const QuantizedMatrix y = one_bit_quantize(h * x + awgn(16, 40, snr.noise_power(), rng));
    const BlockDetection a = two_stage_detect(y, h, qpsk, snr);
    const BlockDetection b = two_stage_detect(y, h, qpsk, snr);
    CHECK(a.indices == b.indices);
    CHECK(a.cardinalities == b.cardinalities);
    const RowMatrix rows = block_lift(h);
    const DetRealForms forms = realify_det(y, h);
    double sum = 0.0;
    for (int m = 0; m < 40; ++m) {
        const DetectionResult r = detect_vector(forms.Y.col(m), rows, qpsk, snr);
        CHECK(r.candidate_cardinality == a.cardinalities[static_cast<std::size_t>(m)]);
        for (int u = 0; u < 3; ++u) {
            CHECK(a.indices(u, m) == r.final[static_cast<std::size_t>(u)]);
        }
        sum += static_cast<double>(r.candidate_cardinality);
    }
    CHECK(a.mean_cardinality() == doctest::Approx(sum / 40.0));
}

TEST_CASE("bit errors use the Gray labels") {
    Eigen::MatrixXi sent(2, 2), got(2, 2);
    sent << 0, 1, 2, 3;
    got << 3, 1, 2, 0;
    CHECK(count_bit_errors(sent, got) == 4);
    CHECK(Constellation::bit_errors(0, 3) == 2);
    // adjacent QPSK points differ in one bit
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(Constellation::bit_errors(qpsk.slice(Complex(r, r)), qpsk.slice(Complex(-r, r))) == 1);
    const Constellation qam = Constellation::qam16();
    for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
            const double d = std::abs(qam.point(a) - qam.point(b)) * std::sqrt(10.0);
            if (std::abs(d - 2.0) < 1e-9) {
                CHECK(Constellation::bit_errors(a, b) == 1);
            }
        }
    }
}
