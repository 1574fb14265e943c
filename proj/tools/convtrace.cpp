#include <CLI11.hpp>

#include "convtrace/cli.hpp"
#include "convtrace/log.hpp"

using namespace convtrace;

namespace {

void add_em_options(CLI::App* cmd, em::EmConfig& em)
{
    cmd->add_option("--max-iters", em.max_iters, "EM iteration cap")->capture_default_str();
    cmd->add_option("--tol", em.tol, "Convergence tolerance on the kernel")->capture_default_str();
    cmd->add_option("--sigma-init", em.sigma_init)->capture_default_str();
    cmd->add_option("--sigma-floor", em.sigma_floor)->capture_default_str();
    cmd->add_option("--prior", em.prior_m1, "Prior probability of the linear model")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    log::init_from_env();

    CLI::App app{"Convolutional trace extraction and deepfake classification"};
    app.require_subcommand(1);

    cli::SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
    c_synth->add_option("--spec", synth.spec_file, "JSON generator spec")->required();
    c_synth->add_option("--out", synth.out_dir, "Output directory")->required();

    cli::ExtractArgs extract;
    std::size_t crop = 0;
    auto* c_extract = app.add_subcommand("extract", "Extract convolutional traces to a feature CSV");
    c_extract->add_option("--manifest", extract.manifest)->required();
    c_extract->add_option("--alpha", extract.alpha, "Neighborhood radius")->capture_default_str();
    c_extract->add_option("--out", extract.out_csv, "Feature CSV")->required();
    c_extract->add_option("--jobs", extract.jobs)->capture_default_str();
    c_extract->add_option("--crop", crop, "Center crop to N x N before extraction");
    add_em_options(c_extract, extract.em);

    cli::AttackArgs attack;
    auto* c_attack = app.add_subcommand("attack", "Apply one attack to every image of a manifest");
    c_attack->add_option("--manifest", attack.manifest)->required();
    c_attack->add_option("--attack", attack.attack, "random-square | blur:3|9|15 | rotate:45|90|180 | scale:+50|-50 | jpeg:50")
        ->required();
    c_attack->add_option("--seed", attack.seed)->capture_default_str();
    c_attack->add_option("--out", attack.out_dir)->required();
    c_attack->add_option("--jobs", attack.jobs)->capture_default_str();

    cli::TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Train a classifier on feature CSVs");
    c_train->add_option("--features", train.features)->required();
    c_train->add_option("--classifier", train.classifier, "knn<k> | lda | svm | rf")->capture_default_str();
    c_train->add_option("--seed", train.seed)->capture_default_str();
    c_train->add_option("--out", train.out_model)->required();

    cli::EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Evaluate the classifier bank per kernel size");
    c_eval->add_option("--features", eval.features)->required();
    c_eval->add_option("--classifiers", eval.classifiers, "Subset of the bank (default: all)")->delimiter(',');
    c_eval->add_option("--mode", eval.mode, "split70 | cv5")->capture_default_str();
    c_eval->add_option("--pairing", eval.pairing, "pooled | pairwise")->capture_default_str();
    c_eval->add_option("--seed", eval.seed)->capture_default_str();
    c_eval->add_option("--out", eval.out_dir)->required();

    cli::ReportArgs report;
    std::string report_out;
    auto* c_report = app.add_subcommand("report", "Render report CSVs as text tables");
    c_report->add_option("inputs", report.inputs)->required();
    c_report->add_option("--out", report_out);

    cli::PredictArgs predict;
    auto* c_predict = app.add_subcommand("predict", "Label feature rows with a trained model");
    c_predict->add_option("--model", predict.model)->required();
    c_predict->add_option("--features", predict.features)->required();
    c_predict->add_option("--out", predict.out_csv)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    return cli::run_guarded([&] {
        if (*c_synth) return cli::cmd_synth(synth);
        if (*c_extract) {
            if (crop) extract.crop = crop;
            return cli::cmd_extract(extract);
        }
        if (*c_attack) return cli::cmd_attack(attack);
        if (*c_train) return cli::cmd_train(train);
        if (*c_eval) return cli::cmd_eval(eval);
        if (*c_report) {
            if (!report_out.empty()) report.out = report_out;
            return cli::cmd_report(report);
        }
        return cli::cmd_predict(predict);
    });
}
