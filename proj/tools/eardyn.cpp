// eardyn: simulate / enroll / auth / evaluate for the ear-canal
// authentication pipeline.
//
// Exit codes: 0 accept or success, 1 reject, 2 usage, 3 data,
// 4 no evidence.

#include "eardyn/auth.hpp"
#include "eardyn/dataset.hpp"
#include "eardyn/errors.hpp"
#include "eardyn/pipeline.hpp"
#include "eardyn/store.hpp"
#include "eardyn/wav.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace eardyn;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNoEvidence = 4;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct ProbeFlags {
    double f_start = 16000.0;
    double f_end = 23000.0;
    double chirp_ms = 10.0;
    double guard_ms = 2.0;
    double sample_rate = 48000.0;
    double amplitude = 0.8;

    void attach(CLI::App& cmd) {
        cmd.add_option("--f-start", f_start, "Probe sweep start, Hz");
        cmd.add_option("--f-end", f_end, "Probe sweep end, Hz");
        cmd.add_option("--chirp-ms", chirp_ms, "Chirp duration, ms");
        cmd.add_option("--guard-ms", guard_ms, "Guard gap between chirps, ms");
        cmd.add_option("--sample-rate", sample_rate, "Sample rate, Hz");
        cmd.add_option("--amplitude", amplitude, "Probe peak amplitude, (0, 1]");
    }

    ProbeConfig config() const {
        ProbeConfig probe;
        probe.f_start_hz = f_start;
        probe.f_end_hz = f_end;
        probe.chirp_duration_s = chirp_ms / 1000.0;
        probe.guard_gap_s = guard_ms / 1000.0;
        probe.sample_rate_hz = sample_rate;
        probe.amplitude = amplitude;
        return probe;
    }
};

int cmd_simulate(const DatasetParams& params, const std::string& out_dir) {
    const auto manifest = generate_dataset(params, out_dir);
    std::size_t sessions = 0;
    for (const auto& s : manifest.subjects) sessions += s.sessions.size();
    std::printf("wrote %zu subjects, %zu sessions to %s\n", manifest.subjects.size(), sessions,
                out_dir.c_str());
    return kExitAccept;
}

int cmd_enroll(const std::string& user_id, const std::string& manifest_path,
               const std::string& out_path) {
    const auto dataset = load_dataset(manifest_path);
    PipelineConfig cfg;
    cfg.probe = dataset.manifest.probe;
    const auto enrolled = enroll_user(dataset, user_id, cfg);

    TemplateFile file;
    file.tmpl = enrolled.tmpl;
    file.classifier = enrolled.classifier;
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + out_path);
    out << save_template(file);
    std::string skipped;
    if (enrolled.tmpl.skipped_keys)
        skipped = " (" + std::to_string(enrolled.tmpl.skipped_keys) +
                  " keys below the 3-sample minimum skipped)";
    std::printf("enrolled %s: %zu template keys, %zu boosting rounds%s\n", user_id.c_str(),
                enrolled.tmpl.entries.size(), enrolled.classifier.rounds.size(),
                skipped.c_str());
    return kExitAccept;
}

int cmd_auth(const std::string& template_path, const std::string& recording_path,
             const std::string& annotations_path, const std::string& imu_path,
             const ProbeFlags& probe) {
    const TemplateFile file = load_template(read_text_file(template_path));
    if (!file.classifier)
        throw DataError("template " + template_path + " has no trained classifier");

    PipelineConfig cfg;
    cfg.probe = probe.config();
    const Recording recording = read_wav(recording_path);
    const auto session = extract_session(recording, read_text_file(annotations_path),
                                         parse_imu(read_text_file(imu_path)), cfg);
    if (session.features.empty())
        throw NoEvidenceError("no usable segments and no static window");

    const AuthDecision decision = authenticate(file.tmpl, *file.classifier, session.features);
    std::string keys;
    for (const auto& key : decision.template_keys_used) {
        if (!keys.empty()) keys += ",";
        keys += key_to_string(key);
    }
    std::printf("decision=%s score=%.6f features_used=%d keys=%s posture=%s%s\n",
                decision.accept ? "accept" : "reject", decision.score, decision.segments_used,
                keys.c_str(), std::string(posture_token(session.motion.posture)).c_str(),
                session.motion.moving ? " moving" : "");
    return decision.accept ? kExitAccept : kExitReject;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& sweep_spec,
                 const std::string& report_path, std::string roc_path) {
    int sweep_min = 1, sweep_max = 5;
    {
        const auto dots = sweep_spec.find("..");
        if (dots == std::string::npos)
            throw ConfigError("--phoneme-sweep expects LO..HI, e.g. 1..5");
        try {
            sweep_min = std::stoi(sweep_spec.substr(0, dots));
            sweep_max = std::stoi(sweep_spec.substr(dots + 2));
        } catch (const std::exception&) {
            throw ConfigError("--phoneme-sweep expects LO..HI, e.g. 1..5");
        }
    }
    const auto dataset = load_dataset(manifest_path);
    if (sweep_min < 1 || sweep_max < sweep_min ||
        sweep_max > dataset.manifest.phonemes_per_session)
        throw ConfigError("--phoneme-sweep range exceeds the dataset's phonemes per session");

    PipelineConfig cfg;
    cfg.probe = dataset.manifest.probe;
    const auto result = evaluate_dataset(dataset, sweep_min, sweep_max, cfg);

    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& point : result.sweep)
        sweep.push_back({{"phonemes", point.phoneme_count},
                         {"accuracy", point.accuracy},
                         {"recall", point.recall},
                         {"precision", point.precision},
                         {"f1", point.f1}});
    nlohmann::json roc = nlohmann::json::array();
    for (const auto& point : result.report.roc)
        roc.push_back({point.threshold, point.tar, point.far});
    const nlohmann::json doc{
        {"accuracy", result.report.accuracy},
        {"recall", result.report.recall},
        {"precision", result.report.precision},
        {"f1", result.report.f1},
        {"auc", result.report.auc},
        {"roc", std::move(roc)},
        {"counts",
         {{"genuine", result.report.genuine_count},
          {"impostor", result.report.impostor_count},
          {"test_sessions", result.sessions_evaluated},
          {"subjects", dataset.subjects.size()}}},
        {"phoneme_sweep", std::move(sweep)},
        // Mean scores reported by the 24-participant human study, for context.
        {"reference_human_study_means",
         {{"accuracy", 0.9304}, {"recall", 0.9738}, {"precision", 0.9502}, {"f1", 0.9684}}}};

    std::ofstream report(report_path, std::ios::binary | std::ios::trunc);
    if (!report) throw DataError("cannot write " + report_path);
    report << doc.dump(2) << "\n";

    if (roc_path.empty()) roc_path = report_path + ".roc.tsv";
    std::ofstream roc_out(roc_path, std::ios::binary | std::ios::trunc);
    if (!roc_out) throw DataError("cannot write " + roc_path);
    char line[120];
    for (const auto& point : result.report.roc) {
        std::snprintf(line, sizeof line, "%.17g\t%.17g\t%.17g\n", point.threshold, point.tar,
                      point.far);
        roc_out << line;
    }

    std::printf("accuracy=%.4f recall=%.4f precision=%.4f f1=%.4f auc=%.4f\n",
                result.report.accuracy, result.report.recall, result.report.precision,
                result.report.f1, result.report.auc);
    for (const auto& point : result.sweep)
        std::printf("phonemes=%d accuracy=%.4f\n", point.phoneme_count, point.accuracy);
    std::printf("reference human-study means: accuracy=0.9304 recall=0.9738 "
                "precision=0.9502 f1=0.9684\n");
    std::printf("report: %s\nroc: %s\n", report_path.c_str(), roc_path.c_str());
    return kExitAccept;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ear-canal acoustic authentication pipeline"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
    DatasetParams params;
    std::string out_dir;
    ProbeFlags sim_probe;
    simulate->add_option("--subjects", params.subjects, "Number of subjects (>= 2)")->required();
    simulate->add_option("--seed", params.seed, "Population seed")->required();
    simulate->add_option("--snr-db", params.snr_db, "Reflection SNR in dB")->capture_default_str();
    simulate->add_option("--phonemes-per-session", params.phonemes_per_session,
                         "Distinct categories per speech session")->capture_default_str();
    simulate->add_option("--enroll-sessions", params.enroll_speech_sessions,
                         "Enrollment speech sessions per subject")->capture_default_str();
    simulate->add_option("--static-sessions", params.enroll_static_sessions,
                         "Enrollment static sessions per subject")->capture_default_str();
    simulate->add_option("--test-sessions", params.test_sessions,
                         "Held-out test sessions per subject")->capture_default_str();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    sim_probe.attach(*simulate);

    // enroll
    auto* enroll_cmd = app.add_subcommand("enroll", "Enroll one subject from a dataset");
    std::string user_id, manifest_path, template_out;
    enroll_cmd->add_option("--user", user_id, "Subject id")->required();
    enroll_cmd->add_option("--manifest", manifest_path, "Dataset manifest path")->required();
    enroll_cmd->add_option("--out", template_out, "Template file to write")->required();

    // auth
    auto* auth_cmd = app.add_subcommand("auth", "Authenticate one session against a template");
    std::string template_path, recording_path, annotations_path, imu_path;
    ProbeFlags auth_probe;
    auth_cmd->add_option("--template", template_path, "Template file")->required();
    auth_cmd->add_option("--recording", recording_path, "Session WAV")->required();
    auth_cmd->add_option("--annotations", annotations_path, "Phoneme annotation file")->required();
    auth_cmd->add_option("--imu", imu_path, "IMU trace file")->required();
    auth_probe.attach(*auth_cmd);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Population evaluation with phoneme sweep");
    std::string eval_manifest, sweep_spec = "1..5", report_path, roc_path;
    eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest path")->required();
    eval_cmd->add_option("--phoneme-sweep", sweep_spec, "Phoneme count range, LO..HI")->capture_default_str();
    eval_cmd->add_option("--out", report_path, "Report JSON to write")->required();
    eval_cmd->add_option("--roc-out", roc_path, "ROC TSV to write (default <report>.roc.tsv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            params.probe = sim_probe.config();
            return cmd_simulate(params, out_dir);
        }
        if (enroll_cmd->parsed()) return cmd_enroll(user_id, manifest_path, template_out);
        if (auth_cmd->parsed())
            return cmd_auth(template_path, recording_path, annotations_path, imu_path,
                            auth_probe);
        if (eval_cmd->parsed())
            return cmd_evaluate(eval_manifest, sweep_spec, report_path, roc_path);
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoEvidenceError& e) {
        std::cerr << "no evidence: " << e.what() << "\n";
        return kExitNoEvidence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
