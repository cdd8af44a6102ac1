#include <gtest/gtest.h>

#include <random>

#include "mv/errors.hpp"
#include "mv/preorder.hpp"

using namespace mv;

namespace {

CVal etale(const Field* k, std::vector<long> c) {
    std::vector<KElem> v;
    for (long x : c) v.push_back(k->from_int(x));
    return CVal::atom(ClassAtom::etale(KUPoly(k, v)));
}

ClassAtom random_atom(std::mt19937& rng, const Field* k) {
    switch (rng() % 4) {
        case 0: return ClassAtom::point();
        case 1: return ClassAtom::power_of_L(static_cast<long>(rng() % 3));
        case 2: return ClassAtom::etale(KUPoly(k, {k->from_int(-2), k->zero(), k->one()}));
        default: return ClassAtom::etale(KUPoly(k, {k->from_int(-2), k->zero(), k->zero(), k->one()}));
    }
}

// Over Q products of two etale classes are not formed, so phi values of
// random witnesses stay atom-free there.
CVal random_nonneg(std::mt19937& rng, const Field* k, bool atoms = true) {
    CVal v;
    int terms = static_cast<int>(rng() % 4);
    for (int i = 0; i < terms; ++i) {
        MotElem c = MotElem(static_cast<long>(rng() % 3 + 1)) * MotElem::L(static_cast<long>(rng() % 7) - 3);
        if (rng() % 3 == 0) c *= MotElem(1) - MotElem::L(-1);
        v += atoms ? CVal::atom(random_atom(rng, k), c) : CVal(c);
    }
    return v;
}

Witness random_witness(std::mt19937& rng, const Field* k) {
    Witness w;
    w.k = k;
    int ny = static_cast<int>(rng() % 3) + 1;
    for (int i = 0; i < ny; ++i) {
        std::string y = "y" + std::to_string(i);
        w.Y.push_back({y, random_atom(rng, k)});
        w.phi[y] = random_nonneg(rng, k, !k->is_Q());
        int nz = static_cast<int>(rng() % 3) + 1;
        for (int j = 0; j < nz; ++j) {
            std::string z = y + "z" + std::to_string(j);
            w.Z.push_back({z, random_atom(rng, k)});
            w.f[z] = y;
        }
    }
    return w;
}

}  // namespace

TEST(Preorder, QuadraticCover) {
    const Field* Q = Field::Q();
    CVal F = etale(Q, {-2, 0, 1}) - CVal(1);
    Witness w = quadratic_cover_witness(Q);
    EXPECT_TRUE(check_witness(F, w));
    EXPECT_FALSE(check_witness(-F, w));
    EXPECT_FALSE(F.is_nonneg());  // not in the image of the nonnegative cone
    Witness sum = combine(w, embed_nonneg(CVal(1)));
    EXPECT_TRUE(check_witness(etale(Q, {-2, 0, 1}), sum));
}

TEST(Preorder, EmbedAndCombine) {
    const Field* Q = Field::Q();
    EXPECT_TRUE(check_witness(CVal(1), embed_nonneg(CVal(1))));
    EXPECT_TRUE(check_witness(CVal(MotElem::L(-1)), embed_nonneg(CVal(MotElem::L(-1)))));
    EXPECT_TRUE(check_witness(CVal(0), embed_nonneg(CVal(0))));
    EXPECT_TRUE(check_witness(CVal(2), combine(embed_nonneg(CVal(1)), embed_nonneg(CVal(1)))));
    EXPECT_THROW(embed_nonneg(CVal(-1)), NegativePhi);
    std::mt19937 rng(11);
    for (int it = 0; it < 200; ++it) {
        CVal a = random_nonneg(rng, Q), b = random_nonneg(rng, Q);
        Witness wa = embed_nonneg(a), wb = embed_nonneg(b);
        ASSERT_TRUE(check_witness(a, wa)) << a.str();
        ASSERT_TRUE(check_witness(a + b, combine(wa, wb))) << a.str() << " + " << b.str();
        Witness r = random_witness(rng, Q), s = random_witness(rng, Q);
        ASSERT_TRUE(check_witness(witness_value(r) + witness_value(s), combine(r, s)));
        EXPECT_EQ(witness_value(combine(r, embed_nonneg(CVal(0)))), witness_value(r));
    }
}

TEST(Preorder, TamperedWitnesses) {
    const Field* Q = Field::Q();
    CVal F = etale(Q, {-2, 0, 1}) - CVal(1);
    Witness w = quadratic_cover_witness(Q);
    Witness drop = w;
    drop.Z.clear();
    drop.f.clear();
    EXPECT_THROW(check_witness(F, drop), NotSurjective);
    Witness neg = w;
    neg.phi["pt"] = CVal(-1);
    EXPECT_THROW(check_witness(F, neg), NegativePhi);
    Witness partial = w;
    partial.f.clear();
    EXPECT_THROW(check_witness(F, partial), DomainError);
    // removing one of the two points of the embed witness breaks the identity
    CVal G = CVal(MotElem::L(2));
    Witness e = embed_nonneg(G);
    e.Z.pop_back();
    e.f.erase("1");
    EXPECT_FALSE(check_witness(G, e));
}

TEST(Preorder, Specialization) {
    const Field* F7 = Field::F(7);
    CVal F = etale(F7, {-2, 0, 1}) - CVal(1);
    SpecializedCheck s = specialize_witness(F, quadratic_cover_witness(F7), 7);
    EXPECT_TRUE(s.verified);
    EXPECT_EQ(s.value, 1);
    EXPECT_TRUE(s.nonneg);
    const Field* Q = Field::Q();
    EXPECT_THROW(specialize_witness(etale(Q, {-2, 0, 1}) - CVal(1), quadratic_cover_witness(Q), 3),
                 BaseFieldMismatch);
    // x^2 - 2 has no root mod 3, so the cover is not surjective there
    const Field* F3 = Field::F(3);
    EXPECT_THROW(specialize_witness(etale(F3, {-2, 0, 1}) - CVal(1), quadratic_cover_witness(F3), 3),
                 NotSurjective);
}

TEST(Preorder, VerifiedValuesCountNonnegatively) {
    std::mt19937 rng(5);
    int checked = 0;
    for (int q : {5, 7, 11, 23}) {
        const Field* k = Field::F(q);
        for (int it = 0; it < 100; ++it) {
            Witness w = random_witness(rng, k);
            CVal F = witness_value(w);
            try {
                SpecializedCheck s = specialize_witness(F, w, q);
                ASSERT_TRUE(s.verified);
                ASSERT_TRUE(s.nonneg) << F.str() << " at q=" << q;
                ++checked;
            } catch (const NotSurjective&) {
            }
            CVal e = random_nonneg(rng, k);
            ASSERT_GE(specialize_witness(e, embed_nonneg(e, k), q).value, 0);
        }
    }
    EXPECT_GT(checked, 100);
}
