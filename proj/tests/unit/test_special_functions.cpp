#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "acops/special_functions.hpp"

namespace {

struct EiCase {
    double x;
    double ref;
};

// 20-digit reference values (mpmath).
const EiCase kEiTable[] = {
    {-1e-6, -13.238295893062491289},
    {-0.001, -6.3315393641361493112},
    {-0.1, -1.8229239584193906159},
    {-0.5, -0.55977359477616081175},
    {-1.0, -0.21938393439552027368},
    {-1.5, -0.1000195824066326519},
    {-5.0, -0.0011482955912753257973},
    {-20.0, -9.8355252906498816904e-11},
    {-50.0, -3.7832640295504590187e-24},
    {-200.0, -6.8852261063076355977e-90},
    {0.001, -6.3295393640250381967},
    {0.5, 0.45421990486317357992},
    {1.0, 1.8951178163559367555},
    {2.0, 4.9542343560018901634},
    {10.0, 2492.2289762418777591},
    {40.0, 6039718263611241.5784},
    {60.0, 1.9361822139292765388e24},
};

} // namespace

TEST(ExponentialIntegral, MatchesReferenceTable)
{
    for (const auto& c : kEiTable)
        EXPECT_NEAR(acops::expint_ei(c.x) / c.ref, 1.0, 1e-10) << "x = " << c.x;
}

TEST(ExponentialIntegral, E1AgreesWithBoostOnGrid)
{
    for (double x = 0.01; x < 300.0; x *= 1.37)
        EXPECT_NEAR(acops::expint_e1(x) / boost::math::expint(1, x), 1.0, 1e-12) << "x = " << x;
}

TEST(ExponentialIntegral, EiAgreesWithBoostAcrossBranchSwitches)
{
    for (double x : {0.99, 1.0, 1.01, 39.9, 40.0, 40.1, 100.0, 500.0})
        EXPECT_NEAR(acops::expint_ei(x) / boost::math::expint(x), 1.0, 1e-12) << "x = " << x;
}

TEST(ExponentialIntegral, NegativeArgumentIsMinusE1)
{
    for (double x : {0.3, 2.0, 17.0})
        EXPECT_DOUBLE_EQ(acops::expint_ei(-x), -acops::expint_e1(x));
}

TEST(ExponentialIntegral, DomainErrors)
{
    EXPECT_THROW(acops::expint_ei(0.0), acops::numeric_error);
    EXPECT_THROW(acops::expint_ei(710.0), acops::numeric_error);
    EXPECT_THROW(acops::expint_e1(0.0), std::domain_error);
    EXPECT_THROW(acops::expint_e1(-1.0), std::domain_error);
}

TEST(ExponentialIntegral, E1UnderflowsToZero)
{
    EXPECT_EQ(acops::expint_e1(800.0), 0.0);
}
