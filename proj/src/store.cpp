#include "eardyn/store.hpp"
#include "eardyn/errors.hpp"
#include "eardyn/phoneme.hpp"
#include "eardyn/wav.hpp"

#include <json.hpp>

#include <cfloat>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eardyn {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct LineReader {
    std::string_view text;
    std::size_t pos = 0;
    int line_no = 0;

    bool next(std::string_view& line) {
        while (pos <= text.size()) {
            if (pos == text.size()) return false;
            const std::size_t eol = std::min(text.find('\n', pos), text.size());
            line = text.substr(pos, eol - pos);
            ++line_no;
            pos = eol + 1;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!line.empty()) return true;
        }
        return false;
    }
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view field, int line_no) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw DataError("template line " + std::to_string(line_no) + ": bad number '" +
                        std::string(field) + "'");
    return v;
}

long parse_long(std::string_view field, int line_no) {
    long v = 0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw DataError("template line " + std::to_string(line_no) + ": bad integer '" +
                        std::string(field) + "'");
    return v;
}

TemplateKey parse_key(std::string_view cat, std::string_view posture, int line_no) {
    TemplateKey key;
    try {
        if (cat != "STATIC") {
            const auto c = category_from_token(cat);
            if (c == DeformationCategory::Excluded)
                throw ParseError("excluded category in template");
            key.category = c;
        }
        key.posture = posture_from_token(posture);
    } catch (const ParseError& e) {
        throw DataError("template line " + std::to_string(line_no) + ": " + e.what());
    }
    return key;
}

} // namespace

std::string save_template(const TemplateFile& file) {
    if (file.format_version != 1)
        throw ConfigError("save_template: only format version 1 is written");
    if (file.tmpl.entries.empty())
        throw ConfigError("save_template: template has no entries");

    const auto& first = file.tmpl.entries.begin()->second.mean;
    std::ostringstream out;
    out << "EARDYN-TEMPLATE v1\n";
    out << "user " << file.tmpl.user_id << "\n";
    out << "band " << fmt_double(first.f_low_hz) << " " << fmt_double(first.f_high_hz) << " "
        << fmt_double(first.bin_hz) << "\n";
    for (const auto& [key, entry] : file.tmpl.entries) {
        const std::string_view cat =
            key.category ? category_token(*key.category) : std::string_view("STATIC");
        out << "entry " << cat << " " << posture_token(key.posture) << " " << entry.n_samples
            << " " << fmt_double(entry.mu_w) << " " << fmt_double(entry.sigma_w) << "\n";
        for (std::size_t i = 0; i < entry.mean.values.size(); ++i)
            out << (i ? " " : "") << fmt_double(entry.mean.values[i]);
        out << "\n";
    }
    if (file.classifier) {
        out << "boost " << file.classifier->rounds.size() << "\n";
        for (const auto& round : file.classifier->rounds) {
            const auto& key = round.stump.key;
            const std::string_view cat =
                key.category ? category_token(*key.category) : std::string_view("STATIC");
            out << "round " << cat << " " << posture_token(key.posture) << " "
                << fmt_double(round.stump.threshold) << " " << fmt_double(round.alpha) << " "
                << fmt_double(round.epsilon) << "\n";
        }
    }
    return out.str();
}

TemplateFile load_template(std::string_view text) {
    LineReader reader{text};
    std::string_view line;

    if (!reader.next(line)) throw DataError("template: empty file");
    if (line != "EARDYN-TEMPLATE v1")
        throw DataError("template line 1: unsupported header '" + std::string(line) + "'");

    if (!reader.next(line) || !line.starts_with("user "))
        throw DataError("template line " + std::to_string(reader.line_no) +
                        ": expected 'user <id>'");
    TemplateFile file;
    file.tmpl.user_id = std::string(line.substr(5));

    if (!reader.next(line) || !line.starts_with("band "))
        throw DataError("template line " + std::to_string(reader.line_no) +
                        ": expected 'band <f_low> <f_high> <bin_hz>'");
    const auto band = split_ws(line.substr(5));
    if (band.size() != 3)
        throw DataError("template line " + std::to_string(reader.line_no) + ": bad band line");
    const double f_low = parse_double(band[0], reader.line_no);
    const double f_high = parse_double(band[1], reader.line_no);
    const double bin_hz = parse_double(band[2], reader.line_no);

    while (reader.next(line)) {
        if (line.starts_with("entry ")) {
            const auto fields = split_ws(line.substr(6));
            if (fields.size() != 5)
                throw DataError("template line " + std::to_string(reader.line_no) +
                                ": entry needs category posture n mu_w sigma_w");
            const TemplateKey key = parse_key(fields[0], fields[1], reader.line_no);
            TemplateEntry entry;
            entry.n_samples = static_cast<int>(parse_long(fields[2], reader.line_no));
            entry.mu_w = parse_double(fields[3], reader.line_no);
            entry.sigma_w = parse_double(fields[4], reader.line_no);
            if (!reader.next(line))
                throw DataError("template line " + std::to_string(reader.line_no) +
                                ": truncated entry, feature line missing");
            entry.mean.f_low_hz = f_low;
            entry.mean.f_high_hz = f_high;
            entry.mean.bin_hz = bin_hz;
            for (const auto field : split_ws(line))
                entry.mean.values.push_back(parse_double(field, reader.line_no));
            if (entry.mean.values.empty())
                throw DataError("template line " + std::to_string(reader.line_no) +
                                ": empty feature line");
            if (!file.tmpl.entries.emplace(key, std::move(entry)).second)
                throw DataError("template line " + std::to_string(reader.line_no) +
                                ": duplicate entry " + key_to_string(key));
        } else if (line.starts_with("boost ")) {
            const long rounds = parse_long(split_ws(line.substr(6)).at(0), reader.line_no);
            BoostedClassifier classifier;
            for (long i = 0; i < rounds; ++i) {
                if (!reader.next(line) || !line.starts_with("round "))
                    throw DataError("template line " + std::to_string(reader.line_no) +
                                    ": truncated boost section");
                const auto fields = split_ws(line.substr(6));
                if (fields.size() != 5)
                    throw DataError("template line " + std::to_string(reader.line_no) +
                                    ": round needs category posture theta alpha eps");
                BoostRound round;
                round.stump.key = parse_key(fields[0], fields[1], reader.line_no);
                round.stump.threshold = parse_double(fields[2], reader.line_no);
                round.alpha = parse_double(fields[3], reader.line_no);
                round.epsilon = parse_double(fields[4], reader.line_no);
                classifier.rounds.push_back(std::move(round));
            }
            file.classifier = std::move(classifier);
        } else {
            throw DataError("template line " + std::to_string(reader.line_no) +
                            ": unexpected line '" + std::string(line.substr(0, 32)) + "'");
        }
    }
    if (file.tmpl.entries.empty()) throw DataError("template: no entries");
    return file;
}

namespace {

using nlohmann::json;

json probe_to_json(const ProbeConfig& p) {
    return json{{"f_start_hz", p.f_start_hz},
                {"f_end_hz", p.f_end_hz},
                {"chirp_duration_s", p.chirp_duration_s},
                {"guard_gap_s", p.guard_gap_s},
                {"sample_rate_hz", p.sample_rate_hz},
                {"amplitude", p.amplitude}};
}

ProbeConfig probe_from_json(const json& j) {
    ProbeConfig p;
    p.f_start_hz = j.at("f_start_hz").get<double>();
    p.f_end_hz = j.at("f_end_hz").get<double>();
    p.chirp_duration_s = j.at("chirp_duration_s").get<double>();
    p.guard_gap_s = j.at("guard_gap_s").get<double>();
    p.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    p.amplitude = j.at("amplitude").get<double>();
    return p;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    json subjects = json::array();
    for (const auto& s : manifest.subjects) {
        json sessions = json::array();
        for (const auto& sess : s.sessions)
            sessions.push_back(json{{"role", sess.role},
                                    {"recording", sess.recording},
                                    {"annotations", sess.annotations},
                                    {"imu", sess.imu}});
        subjects.push_back(
            json{{"id", s.id}, {"seed", s.seed}, {"sessions", std::move(sessions)}});
    }
    const json doc{{"format", "eardyn-dataset"},
                   {"version", 1},
                   {"population_seed", manifest.population_seed},
                   {"snr_db", manifest.snr_db},
                   {"phonemes_per_session", manifest.phonemes_per_session},
                   {"probe", probe_to_json(manifest.probe)},
                   {"subjects", std::move(subjects)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "eardyn-dataset" ||
            doc.at("version").get<int>() != 1)
            throw DataError("manifest " + path.string() + ": unsupported format/version");
        DatasetManifest manifest;
        manifest.population_seed = doc.at("population_seed").get<std::uint64_t>();
        manifest.snr_db = doc.at("snr_db").get<double>();
        manifest.phonemes_per_session = doc.at("phonemes_per_session").get<int>();
        manifest.probe = probe_from_json(doc.at("probe"));
        for (const auto& s : doc.at("subjects")) {
            SubjectRef subject;
            subject.id = s.at("id").get<std::string>();
            subject.seed = s.at("seed").get<std::uint64_t>();
            for (const auto& sess : s.at("sessions")) {
                SessionRef ref;
                ref.role = sess.at("role").get<std::string>();
                ref.recording = sess.at("recording").get<std::string>();
                ref.annotations = sess.at("annotations").get<std::string>();
                ref.imu = sess.at("imu").get<std::string>();
                subject.sessions.push_back(std::move(ref));
            }
            manifest.subjects.push_back(std::move(subject));
        }
        return manifest;
    } catch (const json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
}

LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
    LoadedDataset dataset;
    dataset.manifest = load_manifest(manifest_path);
    if (dataset.manifest.subjects.empty())
        throw DataError("dataset " + manifest_path.string() + ": empty subject list");

    const auto root = manifest_path.parent_path();
    std::vector<std::string> offenders;
    for (const auto& subject : dataset.manifest.subjects) {
        LoadedSubject loaded;
        loaded.id = subject.id;
        loaded.seed = subject.seed;
        bool ok = true;
        for (const auto& ref : subject.sessions) {
            try {
                LoadedSession session;
                session.ref = ref;
                session.recording = read_wav(root / ref.recording);
                session.annotations_text = read_text_file(root / ref.annotations);
                session.imu = parse_imu(read_text_file(root / ref.imu));
                if (session.recording.sample_rate_hz != dataset.manifest.probe.sample_rate_hz)
                    throw DataError("sample rate differs from manifest probe");
                const double duration = static_cast<double>(session.recording.samples.size()) /
                                        session.recording.sample_rate_hz;
                for (const auto& seg : parse_annotations(session.annotations_text))
                    if (seg.end_s > duration + 1e-9)
                        throw DataError("annotation ends beyond recording end");
                loaded.sessions.push_back(std::move(session));
            } catch (const Error& e) {
                ok = false;
                offenders.push_back(subject.id + " (" + ref.recording + "): " + e.what());
            }
        }
        if (ok) dataset.subjects.push_back(std::move(loaded));
    }
    if (!offenders.empty()) {
        std::string msg = "dataset " + manifest_path.string() + ": invalid subjects:";
        for (const auto& o : offenders) msg += "\n  " + o;
        throw DataError(msg);
    }
    return dataset;
}

} // namespace eardyn
