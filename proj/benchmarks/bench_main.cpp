#include <benchmark/benchmark.h>

#include <random>

#include "whittaker/freegroup.hpp"
#include "whittaker/redtree.hpp"
#include "whittaker/theta.hpp"

using namespace whittaker;

namespace {

Field q5(int prec) { return make_field(FieldDescriptor::parse("5", prec)); }

void BM_Multiply(benchmark::State& state) {
    const Field f = q5(static_cast<int>(state.range(0)));
    const auto x = FieldElement::from_rational(17, 3, f), y = FieldElement::from_rational(-41, 7, f);
    for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_Multiply)->Arg(20)->Arg(100)->Arg(500);

void BM_Sqrt(benchmark::State& state) {
    const Field f = q5(static_cast<int>(state.range(0)));
    const auto x = FieldElement::from_int(6, f);
    for (auto _ : state) benchmark::DoNotOptimize(sqrt(x));
}
BENCHMARK(BM_Sqrt)->Arg(20)->Arg(100);

void BM_BuildTree(benchmark::State& state) {
    const Field f = q5(20);
    std::mt19937_64 rng(1);
    const auto cat = genus3_catalog();
    const auto pts = realize_configuration(cat[0].config.skeleton, f, rng);
    for (auto _ : state) benchmark::DoNotOptimize(build_tree(pts));
}
BENCHMARK(BM_BuildTree);

void BM_WordTable(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(make_word_table(3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_WordTable)->Arg(4)->Arg(6)->Arg(8);

void BM_ThetaGamma(benchmark::State& state) {
    const Field f = q5(20);
    std::mt19937_64 rng(2);
    const Chart& ch = chart("g2b");
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    const auto oc = ordinary_chart(fix.pairs(), rng);
    const ThetaContext ctx(oc.fixed, static_cast<int>(state.range(0)));
    const auto zs = oc.sample(3, rng);
    for (auto _ : state) benchmark::DoNotOptimize(theta_gamma(ctx, zs[0], zs[1], zs[2]));
}
BENCHMARK(BM_ThetaGamma)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FbMap(benchmark::State& state) {
    const Field f = q5(20);
    std::mt19937_64 rng(3);
    const Chart& ch = chart("g3_1");
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    FbOptions o;
    o.length = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fb_map(fix, o));
}
BENCHMARK(BM_FbMap)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_FbInverseKadziela(benchmark::State& state) {
    const Field f = q5(20);
    const BranchTuple branch{"g2b", {FieldElement::parse("25", f), FieldElement::parse("39", f),
                                     FieldElement::parse("1/5", f)}};
    FbInverseOptions o;
    o.target = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fb_inverse(branch, o));
}
BENCHMARK(BM_FbInverseKadziela)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
