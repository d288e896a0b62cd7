#include <gtest/gtest.h>

#include "triple_lab/axioms.hpp"
#include "triple_lab/op_norm.hpp"
#include "triple_lab/triple.hpp"

using namespace triple_lab;

namespace {

const std::vector<TripleModel>& all_models() {
    static const std::vector<TripleModel> models = {
        TripleModel::disc(),        TripleModel::hilbert(2),    TripleModel::hilbert(3),
        TripleModel::matrix(2, 2),  TripleModel::matrix(2, 3),  TripleModel::matrix(3, 2),
    };
    return models;
}

TripleElement hilbert_vec(std::initializer_list<Complex> c) {
    CVector v(static_cast<Eigen::Index>(c.size()));
    int k = 0;
    for (const Complex& x : c) {
        v(k++) = x;
    }
    return {TripleModel::hilbert(static_cast<int>(c.size())), v};
}

double max_abs(const CMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

} // namespace

TEST(TripleModel, ParsesDescriptors) {
    EXPECT_EQ(TripleModel::parse("disc"), TripleModel::disc());
    EXPECT_EQ(TripleModel::parse("hilbert:3").coord_dim(), 3);
    const TripleModel m = TripleModel::parse("matrix:2x3");
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m.cols(), 3);
    EXPECT_EQ(m.coord_dim(), 6);
    EXPECT_EQ(m.norm_kind(), NormKind::spectral);
    EXPECT_EQ(TripleModel::parse("hilbert:4").norm_kind(), NormKind::euclidean);
    EXPECT_EQ(TripleModel::disc().norm_kind(), NormKind::modulus);
    EXPECT_EQ(TripleModel::parse(m.descriptor()), m);
}

TEST(TripleModel, RejectsMalformedDescriptors) {
    for (const char* bad : {"", "disk", "hilbert:", "hilbert:0", "hilbert:x", "matrix:2", "matrix:2x", "matrix:0x2",
                            "matrix:2x3x4"}) {
        EXPECT_THROW(TripleModel::parse(bad), UsageError) << bad;
    }
}

TEST(TripleProduct, ContractExamples) {
    const TripleElement e1 = hilbert_vec({1.0, 0.0});
    const TripleElement e2 = hilbert_vec({0.0, 1.0});
    EXPECT_LE((triple_product(e1, e1, e1).coords - e1.coords).norm(), 1e-15);
    EXPECT_EQ(triple_product(e1, e2, e1).coords.norm(), 0.0);

    const TripleModel m22 = TripleModel::matrix(2, 2);
    const TripleElement e11 = TripleElement::basis(m22, 0);
    EXPECT_LE((triple_product(e11, e11, e11).coords - e11.coords).norm(), 1e-15);

    for (const TripleModel& m : all_models()) {
        std::mt19937_64 rng(3);
        const TripleElement y = random_element(m, rng, 0.7);
        const TripleElement z = random_element(m, rng, 0.4);
        EXPECT_EQ(triple_product(TripleElement::zero(m), y, z).coords.norm(), 0.0);
    }
}

TEST(TripleProduct, ModelMismatchIsUsageError) {
    const TripleElement d = TripleElement::along_first(TripleModel::disc(), 0.5);
    const TripleElement h = TripleElement::along_first(TripleModel::hilbert(1), 0.5);
    EXPECT_THROW(triple_product(d, h, d), UsageError);
    EXPECT_THROW(box_rep(d, h), UsageError);
    EXPECT_THROW(bergman_rep(h, d), UsageError);
}

TEST(TripleProduct, OuterSymmetryIsBitwiseExact) {
    for (const TripleModel& m : all_models()) {
        for (std::uint64_t t = 0; t < 200; ++t) {
            auto rng = derive_stream(5, 0, t);
            const TripleElement x = random_element(m, rng, 0.9);
            const TripleElement y = random_element(m, rng, 0.5);
            const TripleElement z = random_element(m, rng, 0.3);
            EXPECT_EQ(triple_product(x, y, z).coords, triple_product(z, y, x).coords) << m.descriptor();
        }
    }
}

TEST(TripleProduct, LinearOuterConjugateLinearMiddle) {
    for (const TripleModel& m : all_models()) {
        for (std::uint64_t t = 0; t < 200; ++t) {
            auto rng = derive_stream(6, 0, t);
            const TripleElement x = random_element(m, rng, 0.8);
            const TripleElement y = random_element(m, rng, 0.6);
            const TripleElement z = random_element(m, rng, 0.7);
            std::normal_distribution<double> g(0.0, 1.0);
            const double re = g(rng);
            const Complex lambda(re, g(rng));
            const CVector base = triple_product(x, y, z).coords;
            const double scale = std::max(1.0, std::abs(lambda)) * base.norm() + 1e-300;
            EXPECT_LE((triple_product(lambda * x, y, z).coords - lambda * base).norm() / scale, 1e-12);
            EXPECT_LE((triple_product(x, lambda * y, z).coords - std::conj(lambda) * base).norm() / scale, 1e-12);
        }
    }
}

TEST(TripleNorm, ContractExamples) {
    EXPECT_DOUBLE_EQ(triple_norm(TripleElement::along_first(TripleModel::disc(), 0.5)), 0.5);
    EXPECT_NEAR(triple_norm(hilbert_vec({3.0, 4.0})), 5.0, 1e-15);
    CMatrix d(2, 2);
    d << 1.0, 0.0, 0.0, 3.0;
    EXPECT_NEAR(triple_norm(TripleElement::from_matrix(TripleModel::matrix(2, 2), d)), 3.0, 1e-14);
}

TEST(BoxRep, ContractExamples) {
    const TripleElement a = TripleElement::along_first(TripleModel::disc(), 0.5);
    EXPECT_NEAR(std::abs(box_rep(a, a)(0, 0) - 0.25), 0.0, 1e-16);

    const TripleElement e1 = hilbert_vec({1.0, 0.0});
    const CMatrix b = box_rep(e1, e1);
    EXPECT_NEAR(std::abs(b(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b(1, 1) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(std::abs(b(0, 1)) + std::abs(b(1, 0)), 0.0);

    for (const TripleModel& m : all_models()) {
        std::mt19937_64 rng(1);
        EXPECT_EQ(max_abs(box_rep(TripleElement::zero(m), random_element(m, rng, 0.5))), 0.0);
    }
}

TEST(QuadraticRep, ContractExamples) {
    const Complex av(0.3, 0.4);
    const TripleElement a = TripleElement::along_first(TripleModel::disc(), av);
    EXPECT_NEAR(std::abs(quadratic_rep(a).matrix(0, 0) - av * av), 0.0, 1e-16);

    const AntilinearRep q = quadratic_rep(hilbert_vec({1.0, 0.0}));
    EXPECT_NEAR(std::abs(q.matrix(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(std::abs(q.matrix(0, 1)) + std::abs(q.matrix(1, 0)) + std::abs(q.matrix(1, 1)), 0.0);

    EXPECT_EQ(max_abs(quadratic_rep(TripleElement::zero(TripleModel::matrix(2, 3))).matrix), 0.0);
}

TEST(QuadraticRep, ReproducesTripleProductOnRandomArguments) {
    for (const TripleModel& m : all_models()) {
        std::mt19937_64 rng(21);
        const TripleElement x = random_element(m, rng, 0.8);
        const AntilinearRep q = quadratic_rep(x);
        for (int t = 0; t < 100; ++t) {
            const TripleElement z = random_element(m, rng, 0.9);
            const CVector expected = triple_product(x, z, x).coords;
            EXPECT_LE((q.apply(z.coords) - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
        }
    }
}

TEST(QuadraticRep, MatrixModelMatchesClosedForm) {
    // On a C*-triple Q_x z = x z* x.
    const TripleModel m = TripleModel::matrix(2, 3);
    std::mt19937_64 rng(22);
    for (int t = 0; t < 50; ++t) {
        const TripleElement x = random_element(m, rng, 0.9);
        const TripleElement z = random_element(m, rng, 0.9);
        const CMatrix expected = x.as_matrix() * z.as_matrix().adjoint() * x.as_matrix();
        const CVector got = quadratic_rep(x).apply(z.coords);
        EXPECT_LE((got - TripleElement::from_matrix(m, expected).coords).norm(), 1e-14);
    }
}

TEST(BergmanRep, ContractExamples) {
    const TripleElement a = TripleElement::along_first(TripleModel::disc(), 0.5);
    EXPECT_NEAR(std::abs(bergman_rep(a, a)(0, 0) - 0.5625), 0.0, 1e-15);

    for (const TripleModel& m : all_models()) {
        const TripleElement zero = TripleElement::zero(m);
        EXPECT_EQ(bergman_rep(zero, zero), CMatrix(CMatrix::Identity(m.coord_dim(), m.coord_dim())));
    }

    const Spectrum s = spectrum(bergman_rep(hilbert_vec({0.5, 0.0}), hilbert_vec({0.5, 0.0})));
    EXPECT_NEAR(s.eigenvalues[0].real(), 0.75, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1].real(), 0.5625, 1e-14);
}

TEST(BergmanRep, HilbertModelMatchesClosedForm) {
    // B(x,x) z = (1 - ||x||^2)(z - (z|x) x) on a Hilbert space.
    std::mt19937_64 rng(31);
    for (int n : {1, 2, 3, 5}) {
        const TripleModel m = TripleModel::hilbert(n);
        for (int t = 0; t < 20; ++t) {
            const TripleElement x = random_element(m, rng, 0.95);
            const double nx2 = x.coords.squaredNorm();
            const CMatrix expected = (1.0 - nx2) * (CMatrix::Identity(n, n) - x.coords * x.coords.adjoint());
            EXPECT_LE((bergman_rep(x, x) - expected).norm(), 1e-14);
        }
    }
}

TEST(BergmanRep, MatrixModelMatchesClosedForm) {
    // B(x,y) z = (1 - x y*) z (1 - y* x) on a C*-triple.
    const TripleModel m = TripleModel::matrix(2, 3);
    std::mt19937_64 rng(32);
    for (int t = 0; t < 20; ++t) {
        const TripleElement x = random_element(m, rng, 0.9);
        const TripleElement y = random_element(m, rng, 0.7);
        const TripleElement z = random_element(m, rng, 1.0);
        const CMatrix left = CMatrix::Identity(2, 2) - x.as_matrix() * y.as_matrix().adjoint();
        const CMatrix right = CMatrix::Identity(3, 3) - y.as_matrix().adjoint() * x.as_matrix();
        const CMatrix expected = left * z.as_matrix() * right;
        const CVector got = bergman_rep(x, y) * z.coords;
        EXPECT_LE((got - TripleElement::from_matrix(m, expected).coords).norm(), 1e-14);
    }
}

TEST(BergmanSqrt, ContractExamples) {
    const TripleElement a = TripleElement::along_first(TripleModel::disc(), 0.5);
    EXPECT_NEAR(std::abs(bergman_sqrt(a)(0, 0) - 0.75), 0.0, 1e-14);

    const TripleModel m = TripleModel::matrix(2, 2);
    EXPECT_LE((bergman_sqrt(TripleElement::zero(m)) - CMatrix::Identity(4, 4)).norm(), 1e-14);

    const Spectrum s = spectrum(bergman_sqrt(hilbert_vec({0.5, 0.0})));
    EXPECT_NEAR(s.eigenvalues[0].real(), std::sqrt(0.75), 1e-12);
    EXPECT_NEAR(s.eigenvalues[1].real(), 0.75, 1e-12);
}

TEST(BergmanSqrt, OutsideBallIsDomainError) {
    EXPECT_THROW(bergman_sqrt(TripleElement::along_first(TripleModel::disc(), 1.0)), DomainError);
    EXPECT_THROW(bergman_sqrt(TripleElement::along_first(TripleModel::matrix(2, 2), 1.2)), DomainError);
}

TEST(OpNormTriple, ContractExamples) {
    for (const TripleModel& m : all_models()) {
        const int n = m.coord_dim();
        const OpNormEstimate id = op_norm_triple(CMatrix::Identity(n, n), m, {200, 10, 2, 1});
        EXPECT_NEAR(id.estimate, 1.0, 1e-12) << m.descriptor();
        EXPECT_EQ(id.certified, m.has_euclidean_norm());
    }
    const OpNormEstimate disc = op_norm_triple(make_matrix(1, 1, {1.0 / 0.5625}), TripleModel::disc());
    EXPECT_NEAR(disc.estimate, 1.0 / 0.5625, 1e-14);
    EXPECT_TRUE(disc.certified);

    const CMatrix binv = inverse(bergman_sqrt(hilbert_vec({0.5, 0.0})));
    const OpNormEstimate h = op_norm_triple(binv, TripleModel::hilbert(2));
    EXPECT_NEAR(h.estimate, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(triple_norm(TripleElement{h.witness.model, binv * h.witness.coords}), h.estimate, 1e-12);
}

TEST(OpNormTriple, RejectsWrongShape) {
    EXPECT_THROW(op_norm_triple(CMatrix::Identity(3, 3), TripleModel::hilbert(2)), UsageError);
}

TEST(OpNormTriple, InverseBergmanSqrtExactOnEuclideanModels) {
    for (const TripleModel& m : {TripleModel::disc(), TripleModel::hilbert(2), TripleModel::hilbert(3)}) {
        for (std::uint64_t t = 0; t < 100; ++t) {
            auto rng = derive_stream(77, 0, t);
            std::uniform_real_distribution<double> radius(0.0, 0.95);
            const TripleElement x = random_element(m, rng, radius(rng));
            const double target = 1.0 / (1.0 - std::pow(triple_norm(x), 2));
            EXPECT_NEAR(op_norm_triple(inverse(bergman_sqrt(x)), m).estimate, target, 1e-10);
        }
    }
}

TEST(OpNormTriple, InverseBergmanSqrtBracketOnMatrixModel) {
    const TripleModel m = TripleModel::matrix(2, 2);
    for (std::uint64_t t = 0; t < 10; ++t) {
        auto rng = derive_stream(78, 0, t);
        std::uniform_real_distribution<double> radius(0.1, 0.9);
        const TripleElement x = random_element(m, rng, radius(rng));
        const double target = 1.0 / (1.0 - std::pow(triple_norm(x), 2));
        SamplingBudget budget;
        budget.seed = t;
        const OpNormEstimate est = op_norm_triple(inverse(bergman_sqrt(x)), m, budget);
        EXPECT_FALSE(est.certified);
        EXPECT_GE(est.estimate, 0.95 * target);
        EXPECT_LE(est.estimate, 1.001 * target);
        const CMatrix op = inverse(bergman_sqrt(x));
        EXPECT_NEAR(triple_norm(TripleElement{m, op * est.witness.coords}), est.estimate, 1e-14 * target);
        EXPECT_NEAR(triple_norm(est.witness), 1.0, 1e-12);
    }
}

TEST(AxiomSuite, DiscPassesWithTinyJordanResidual) {
    const AxiomReport r = axiom_suite(TripleModel::disc(), 1000, 42, 1e-10);
    EXPECT_TRUE(r.all_passed());
    EXPECT_LT(r.get("jordan_identity").worst_residual, 1e-12);
}

TEST(AxiomSuite, MatrixModelPasses) {
    const AxiomReport r = axiom_suite(TripleModel::matrix(2, 2), 1000, 42, 1e-10);
    for (const auto& a : r.axioms) {
        EXPECT_TRUE(a.passed) << a.name << " residual " << a.worst_residual << " trial " << a.worst_trial;
    }
}

TEST(AxiomSuite, ZeroElementGivesZeroResiduals) {
    for (const TripleModel& m : all_models()) {
        std::mt19937_64 rng(9);
        const TripleElement a = random_element(m, rng, 0.5);
        const TripleElement b = random_element(m, rng, 0.5);
        const TripleElement zero = TripleElement::zero(m);
        const AxiomResiduals r = axiom_residuals(a, b, zero, zero, zero, Complex(0.3, 0.1), {8, 2, 1, 0});
        EXPECT_EQ(r.jordan, 0.0);
        EXPECT_EQ(r.symmetry, 0.0);
        EXPECT_EQ(r.cube_norm, 0.0);
        EXPECT_EQ(r.spectrum_imag, 0.0);
    }
}

TEST(AxiomSuite, RejectsZeroTrials) {
    EXPECT_THROW(axiom_suite(TripleModel::disc(), 0, 1, 1e-10), UsageError);
}

TEST(AxiomSuite, DeterministicForSeed) {
    const AxiomReport a = axiom_suite(TripleModel::hilbert(3), 50, 5, 1e-10);
    const AxiomReport b = axiom_suite(TripleModel::hilbert(3), 50, 5, 1e-10);
    ASSERT_EQ(a.axioms.size(), b.axioms.size());
    for (std::size_t k = 0; k < a.axioms.size(); ++k) {
        EXPECT_EQ(a.axioms[k].worst_residual, b.axioms[k].worst_residual);
        EXPECT_EQ(a.axioms[k].worst_trial, b.axioms[k].worst_trial);
    }
}
