#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpdn/config.hpp"
#include "fpdn/csv.hpp"
#include "fpdn/dataset.hpp"
#include "fpdn/image_io.hpp"
#include "fpdn/synth.hpp"
#include "fpdn/train.hpp"

namespace fs = std::filesystem;
using namespace fpdn;

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 artifact incompatibility.
constexpr int kOkExit = 0, kConfigExit = 2, kNumericExit = 3, kArtifactExit = 4;

struct Cli {
    RunConfig cfg;
    std::string config_path;
    std::optional<int64_t> seed_flag;
    std::optional<std::string> out_flag;
};

void resolve(Cli& cli, const KeyValues& flag_kv) {
    if (!cli.config_path.empty()) apply_config(parse_config_file(cli.config_path), cli.cfg);
    apply_config(flag_kv, cli.cfg);
    if (cli.seed_flag) cli.cfg.seed = static_cast<uint64_t>(*cli.seed_flag);
    if (cli.out_flag) cli.cfg.out_dir = *cli.out_flag;
}

void prepare_out(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    write_resolved_config((fs::path(cfg.out_dir) / "config.txt").string(), cfg);
}

std::vector<Image> gather_images(const RunConfig& cfg) {
    if (!cfg.data_dir.empty())
        return load_dataset(cfg.data_dir, cfg.model.in_h, cfg.model.in_w).images;
    if (cfg.synthetic_count < 3)
        throw ConfigError("need a data dir or a synthetic count of at least 3");
    std::vector<Image> imgs;
    imgs.reserve(cfg.synthetic_count);
    for (int i = 0; i < cfg.synthetic_count; ++i)
        imgs.push_back(synth_fingerprint(cfg.model.in_h, cfg.model.in_w,
                                         mix_seed(cfg.seed, 0x5D000 + i)));
    return imgs;
}

struct SplitImages {
    std::vector<Image> train, val, test;
};

SplitImages split_images(const std::vector<Image>& all, uint64_t seed) {
    Split s = split_dataset(static_cast<int>(all.size()), seed);
    SplitImages out;
    for (int i : s.train) out.train.push_back(all[i]);
    for (int i : s.val) out.val.push_back(all[i]);
    for (int i : s.test) out.test.push_back(all[i]);
    return out;
}

int finish_train(const RunConfig& cfg, Model<float>& model, const SplitImages& data,
                 const std::string& tag) {
    TrainConfig tc = cfg.train;
    const std::string suffix = tag.empty() ? "" : "_" + tag;
    tc.checkpoint_path = (fs::path(cfg.out_dir) / ("model" + suffix + ".ckpt")).string();
    tc.seed = cfg.seed;
    TrainResult res = train(model, data.train, data.val, tc);
    write_history_csv((fs::path(cfg.out_dir) / ("history" + suffix + ".csv")).string(),
                      res.history);
    if (res.diverged) {
        std::cerr << "training diverged at epoch " << res.history.back().epoch
                  << "; last good checkpoint kept\n";
        return kNumericExit;
    }
    std::printf("%s: best val loss %.6g (epoch %d), val PSNR %.2f dB, %lld parameters\n",
                model_kind_name(model.cfg.kind), res.best_val_loss, res.best_epoch,
                res.history.empty() ? 0.0 : res.history[res.best_epoch - 1].val_psnr,
                static_cast<long long>(model.param_count()));
    return kOkExit;
}

int cmd_train(Cli& cli) {
    prepare_out(cli.cfg);
    SplitImages data = split_images(gather_images(cli.cfg), cli.cfg.seed);
    Model<float> model(cli.cfg.model);
    return finish_train(cli.cfg, model, data, "");
}

int cmd_denoise(Cli& cli, const std::string& input, const std::string& checkpoint,
                const std::string& clean_path, double sigma) {
    prepare_out(cli.cfg);
    Model<float> model = load_checkpoint<float>(checkpoint);

    std::vector<std::pair<std::string, std::string>> files;  // (path, stem)
    if (fs::is_directory(input)) {
        for (const auto& e : fs::directory_iterator(input))
            if (e.is_regular_file()) files.emplace_back(e.path().string(), e.path().stem().string());
        std::sort(files.begin(), files.end());
        if (!clean_path.empty())
            throw ConfigError("--clean needs a single input file, not a directory");
    } else {
        files.emplace_back(input, fs::path(input).stem().string());
    }
    if (files.empty()) throw IoError("no input files in " + input);

    const bool batch = files.size() > 1 || fs::is_directory(input);
    size_t index = 0, written = 0;
    for (const auto& [path, stem] : files) {
        Image img;
        try {
            img = read_image(path);
        } catch (const IoError& e) {
            if (!batch) throw;
            std::cerr << "skipping " << path << ": " << e.what() << "\n";
            ++index;
            continue;
        }
        if (img.h != model.cfg.in_h || img.w != model.cfg.in_w) {
            std::cerr << "resizing " << path << " (" << img.h << "x" << img.w << ") to model size "
                      << model.cfg.in_h << "x" << model.cfg.in_w << "\n";
            img = bilinear_resize(img, model.cfg.in_h, model.cfg.in_w);
        }
        Image noisy = sigma > 0
                          ? add_awgn(img, {sigma, mix_seed(cli.cfg.seed, 0xD0 + index), false})
                          : img;
        Image den = denoise_image(model, noisy);
        const std::string out_path =
            (fs::path(cli.cfg.out_dir) / (stem + "_denoised.pgm")).string();
        write_pgm(out_path, den);
        if (!clean_path.empty()) {
            Image clean = read_image(clean_path);
            if (clean.h != den.h || clean.w != den.w)
                clean = bilinear_resize(clean, den.h, den.w);
            write_pgm((fs::path(cli.cfg.out_dir) / (stem + "_triptych.pgm")).string(),
                      hconcat({clean, noisy, den}));
            std::printf("%s: PSNR %.2f dB, SSIM %.4f vs clean\n", stem.c_str(), psnr(den, clean),
                        ssim(den, clean).value);
        } else {
            std::printf("%s -> %s\n", path.c_str(), out_path.c_str());
        }
        ++index;
        ++written;
    }
    if (written == 0) throw IoError("no readable images in " + input);
    return kOkExit;
}

int cmd_evaluate(Cli& cli, const std::string& checkpoint, std::vector<double> sigmas) {
    prepare_out(cli.cfg);
    Model<float> model = load_checkpoint<float>(checkpoint);
    cli.cfg.model = model.cfg;  // data must match the trained geometry
    SplitImages data = split_images(gather_images(cli.cfg), cli.cfg.seed);
    if (sigmas.empty()) sigmas = {0, 25, 50, 100, 150, 200};
    auto rows = evaluate(model, data.test, sigmas, cli.cfg.seed, cli.cfg.train.clip_noise);
    write_eval_csv((fs::path(cli.cfg.out_dir) / "eval.csv").string(), rows);
    for (const auto& r : rows)
        std::printf("%-12s sigma %-5s PSNR %8s  SSIM %8s  MSE %9s  dPSNR %s\n", r.model.c_str(),
                    fmt_g(r.sigma).c_str(), fmt_g(r.psnr).c_str(), fmt_g(r.ssim).c_str(),
                    fmt_g(r.mse).c_str(), fmt_g(r.delta_psnr).c_str());
    return kOkExit;
}

int cmd_compare(Cli& cli, double sigma) {
    prepare_out(cli.cfg);
    SplitImages data = split_images(gather_images(cli.cfg), cli.cfg.seed);
    std::vector<EvalRow> table;
    for (ModelKind kind :
         {ModelKind::dense_nn, ModelKind::autoencoder, ModelKind::wcae, ModelKind::res_wcae}) {
        ModelConfig mc = cli.cfg.model;
        mc.kind = kind;
        Model<float> model(mc);
        int rc = finish_train(cli.cfg, model, data, model_kind_name(kind));
        if (rc != kOkExit) return rc;
        auto rows = evaluate(model, data.test, {sigma}, cli.cfg.seed, cli.cfg.train.clip_noise);
        table.push_back(rows[1]);  // the model row; rows[0] is the shared noisy baseline
    }
    write_eval_csv((fs::path(cli.cfg.out_dir) / "compare.csv").string(), table);
    for (const auto& r : table)
        std::printf("%-12s PSNR %8s  SSIM %8s  MSE %9s  dPSNR %s\n", r.model.c_str(),
                    fmt_g(r.psnr).c_str(), fmt_g(r.ssim).c_str(), fmt_g(r.mse).c_str(),
                    fmt_g(r.delta_psnr).c_str());
    return kOkExit;
}

int cmd_synth_data(Cli& cli, int count) {
    prepare_out(cli.cfg);
    if (count < 1) throw ConfigError("--count must be >= 1");
    synth_dataset(cli.cfg.out_dir, count, cli.cfg.synth_height, cli.cfg.synth_width, cli.cfg.seed);
    std::printf("wrote %d images to %s\n", count, cli.cfg.out_dir.c_str());
    return kOkExit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fingerprint image denoising with wavelet-conditioned convolutional autoencoders"};
    app.require_subcommand(1);
    app.fallthrough();

    Cli cli;
    app.add_option("--config", cli.config_path, "Config file (key = value with [section] headers)");
    int64_t seed_opt = 0;
    auto* seed_o = app.add_option("--seed", seed_opt, "Base seed for all derived randomness");
    std::string out_opt;
    auto* out_o = app.add_option("--out", out_opt, "Output directory");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint + history");
    std::string kind, data_dir, optimizer;
    int synthetic = -1, epochs = -1, batch = -1;
    double sigma = -1, sigma_min = -1, sigma_max = -1, lr = -1, lambda = -1;
    train_cmd->add_option("--kind", kind, "dense_nn | autoencoder | wcae | res_wcae");
    train_cmd->add_option("--data", data_dir, "Directory of PGM/BMP images");
    train_cmd->add_option("--synthetic", synthetic, "Generate N synthetic fingerprints instead");
    train_cmd->add_option("--epochs", epochs, "Maximum epochs");
    train_cmd->add_option("--batch", batch, "Batch size");
    train_cmd->add_option("--lr", lr, "Learning rate");
    train_cmd->add_option("--lambda", lambda, "KLD weight");
    train_cmd->add_option("--optimizer", optimizer, "adam | sgd");
    train_cmd->add_option("--sigma", sigma, "Fixed training noise level (8-bit scale)");
    train_cmd->add_option("--sigma-min", sigma_min, "Lower bound of the training noise range");
    train_cmd->add_option("--sigma-max", sigma_max, "Upper bound of the training noise range");

    // denoise
    auto* den_cmd = app.add_subcommand("denoise", "Run a trained model over an image or directory");
    std::string input, checkpoint, clean_path;
    double den_sigma = 0;
    den_cmd->add_option("input", input, "Input image or directory")->required();
    den_cmd->add_option("--checkpoint", checkpoint, "Trained model checkpoint")->required();
    den_cmd->add_option("--clean", clean_path, "Clean reference; also writes a triptych");
    den_cmd->add_option("--sigma", den_sigma, "Add this much noise before denoising");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Metrics across noise levels on the test split");
    std::string eval_ckpt, eval_data;
    int eval_synth = -1;
    std::vector<double> sigmas;
    eval_cmd->add_option("--checkpoint", eval_ckpt, "Trained model checkpoint")->required();
    eval_cmd->add_option("--data", eval_data, "Directory of PGM/BMP images");
    eval_cmd->add_option("--synthetic", eval_synth, "Use N synthetic fingerprints instead");
    eval_cmd->add_option("--sigmas", sigmas, "Noise levels (default 0 25 50 100 150 200)");

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "Train all four architectures on a shared split");
    std::string cmp_data;
    int cmp_synth = -1, cmp_epochs = -1;
    double cmp_sigma = 100;
    cmp_cmd->add_option("--data", cmp_data, "Directory of PGM/BMP images");
    cmp_cmd->add_option("--synthetic", cmp_synth, "Use N synthetic fingerprints instead");
    cmp_cmd->add_option("--epochs", cmp_epochs, "Maximum epochs per model");
    cmp_cmd->add_option("--sigma", cmp_sigma, "Evaluation noise level");

    // synth-data
    auto* synth_cmd = app.add_subcommand("synth-data", "Write synthetic fingerprints as PGM files");
    int synth_count = 64, synth_h = -1, synth_w = -1;
    synth_cmd->add_option("--count", synth_count, "Number of images");
    synth_cmd->add_option("--height", synth_h, "Image height");
    synth_cmd->add_option("--width", synth_w, "Image width");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOkExit : kConfigExit;  // --help exits cleanly
    }

    try {
        if (*seed_o) cli.seed_flag = seed_opt;
        if (*out_o) cli.out_flag = out_opt;

        KeyValues kv;
        auto put_int = [&kv](const char* k, int v) { kv[k] = std::to_string(v); };
        auto put_f = [&kv](const char* k, double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            kv[k] = buf;
        };
        if (app.got_subcommand(train_cmd)) {
            if (!kind.empty()) kv["model.kind"] = kind;
            if (!data_dir.empty()) kv["data.dir"] = data_dir;
            if (synthetic >= 0) put_int("data.synthetic", synthetic);
            if (epochs >= 0) put_int("train.epochs", epochs);
            if (batch >= 0) put_int("train.batch_size", batch);
            if (lr >= 0) put_f("train.learning_rate", lr);
            if (lambda >= 0) put_f("train.lambda", lambda);
            if (!optimizer.empty()) kv["train.optimizer"] = optimizer;
            if (sigma >= 0) {
                put_f("train.sigma_min", sigma);
                put_f("train.sigma_max", sigma);
            }
            if (sigma_min >= 0) put_f("train.sigma_min", sigma_min);
            if (sigma_max >= 0) put_f("train.sigma_max", sigma_max);
            resolve(cli, kv);
            if (cli.cfg.train.max_epochs < 1) throw ConfigError("epochs must be >= 1");
            return cmd_train(cli);
        }
        if (app.got_subcommand(den_cmd)) {
            resolve(cli, kv);
            return cmd_denoise(cli, input, checkpoint, clean_path, den_sigma);
        }
        if (app.got_subcommand(eval_cmd)) {
            if (!eval_data.empty()) kv["data.dir"] = eval_data;
            if (eval_synth >= 0) put_int("data.synthetic", eval_synth);
            resolve(cli, kv);
            return cmd_evaluate(cli, eval_ckpt, sigmas);
        }
        if (app.got_subcommand(cmp_cmd)) {
            if (!cmp_data.empty()) kv["data.dir"] = cmp_data;
            if (cmp_synth >= 0) put_int("data.synthetic", cmp_synth);
            if (cmp_epochs >= 0) put_int("train.epochs", cmp_epochs);
            resolve(cli, kv);
            if (cli.cfg.train.max_epochs < 1) throw ConfigError("epochs must be >= 1");
            return cmd_compare(cli, cmp_sigma);
        }
        if (app.got_subcommand(synth_cmd)) {
            if (synth_h > 0) put_int("data.height", synth_h);
            if (synth_w > 0) put_int("data.width", synth_w);
            resolve(cli, kv);
            return cmd_synth_data(cli, synth_count);
        }
        throw ConfigError("no command given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericExit;
    } catch (const IncompatibleError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return kArtifactExit;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kArtifactExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
