#include <vector>

#include "doctest.h"
#include "fpdn/model.hpp"
#include "test_support.hpp"

using namespace fpdn;
using testsup::Lcg;

namespace {

Var<float> lcg_input(int h, int w, uint64_t seed) {
    Lcg g(seed);
    auto x = make_var<float>({1, h, w}, false);
    for (auto& v : x->data) v = static_cast<float>(g.uniform(0.05, 0.95));
    return x;
}

ModelConfig kind_cfg(ModelKind k) {
    ModelConfig cfg;
    cfg.kind = k;
    return cfg;
}

}  // namespace

TEST_CASE("parameter counts of the four architectures at default geometry") {
    CHECK(Model<float>(kind_cfg(ModelKind::res_wcae)).param_count() == 966193);
    CHECK(Model<float>(kind_cfg(ModelKind::wcae)).param_count() == 873745);
    CHECK(Model<float>(kind_cfg(ModelKind::autoencoder)).param_count() == 775425);
    CHECK(Model<float>(kind_cfg(ModelKind::dense_nn)).param_count() == 20787104);
    // under the two-million budget
    CHECK(Model<float>(kind_cfg(ModelKind::res_wcae)).param_count() < 2000000);
}

TEST_CASE("forward produces an output of the input shape for every kind") {
    for (ModelKind k : {ModelKind::dense_nn, ModelKind::autoencoder, ModelKind::wcae,
                        ModelKind::res_wcae}) {
        Model<float> m(kind_cfg(k));
        Tape<float> tape;
        auto y = m.forward(tape, lcg_input(103, 96, 51));
        REQUIRE(y->shape == std::vector<int>{1, 103, 96});
        for (float v : y->data) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
        CHECK(all_finite(*y));
    }
}

TEST_CASE("identical seeds give identical parameters and outputs") {
    ModelConfig cfg = kind_cfg(ModelKind::res_wcae);
    cfg.init_seed = 7;
    Model<float> a(cfg), b(cfg);
    auto pa = a.params(), pb = b.params();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->data == pb[i]->data);

    Tape<float> t1, t2;
    auto x = lcg_input(103, 96, 52);
    CHECK(a.forward(t1, x)->data == b.forward(t2, x)->data);

    cfg.init_seed = 8;
    Model<float> c(cfg);
    CHECK(c.params()[0]->data != pa[0]->data);
}

TEST_CASE("forward rejects wrong input shapes") {
    Model<float> m(kind_cfg(ModelKind::autoencoder));
    Tape<float> tape;
    CHECK_THROWS_AS(m.forward(tape, lcg_input(64, 64, 53)), ContractError);
    auto two_ch = make_var<float>({2, 103, 96}, false);
    CHECK_THROWS_AS(m.forward(tape, two_ch), ContractError);
}

TEST_CASE("configs that cannot produce a pyramid or a decoder are rejected") {
    ModelConfig cfg = kind_cfg(ModelKind::res_wcae);
    cfg.wavelet_levels = 5;  // 103 -> 52 -> 26 -> 13 -> 7 -> 4: below sym4 support
    CHECK_THROWS_AS(Model<float>{cfg}, DimensionError);

    ModelConfig one_stage = kind_cfg(ModelKind::autoencoder);
    one_stage.enc_filters = {32};
    CHECK_THROWS_AS(Model<float>{one_stage}, ConfigError);

    ModelConfig no_levels = kind_cfg(ModelKind::wcae);
    no_levels.wavelet_levels = 0;
    CHECK_THROWS_AS(Model<float>{no_levels}, ConfigError);

    CHECK_THROWS_AS(model_kind_from_name("resnet"), ConfigError);
    CHECK(model_kind_from_name("res_wcae") == ModelKind::res_wcae);
}

TEST_CASE("small geometries work end to end with haar") {
    ModelConfig cfg;
    cfg.kind = ModelKind::res_wcae;
    cfg.in_h = 32;
    cfg.in_w = 32;
    cfg.enc_filters = {8, 16};
    cfg.wav_filters = {8};
    cfg.wavelet_levels = 2;
    cfg.wavelet = "haar";
    Model<float> m(cfg);
    Tape<float> tape;
    auto y = m.forward(tape, lcg_input(32, 32, 54));
    CHECK(y->shape == std::vector<int>{1, 32, 32});
    CHECK(m.param_count() < 20000);
}
