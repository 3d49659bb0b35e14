#include "byzfuse/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "byzfuse/serialize.hpp"

namespace byzfuse {

namespace {

constexpr const char* kHeaderLine = "BYZFUSE-DATASET v1";
constexpr const char* kRecordsLine = "RECORDS v1";

}  // namespace

void write_dataset(const Dataset& dataset, std::ostream& out) {
    nlohmann::json meta;
    meta["schema_version"] = 1;
    meta["master_seed"] = dataset.master_seed;
    meta["n"] = dataset.configs.empty() ? 0 : dataset.configs.front().n;
    meta["m"] = dataset.configs.empty() ? 0 : dataset.configs.front().m;
    meta["sample_count"] = dataset.samples.size();
    meta["configs"] = dataset.configs;

    out << kHeaderLine << '\n';
    out << meta.dump(2) << '\n';
    out << kRecordsLine << '\n';
    for (const auto& s : dataset.samples) {
        out << s.config_label << '\t' << s.truth.to_string() << '\t';
        for (Bit b : s.reports.row_major()) out << char('0' + b);
        out << '\t' << (s.fake_sequence ? s.fake_sequence->to_string() : "-") << '\n';
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DatasetIoError("cannot open for writing: " + path.string());
    write_dataset(dataset, out);
    if (!out) throw DatasetIoError("write failed: " + path.string());
}

Dataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeaderLine)
        throw DatasetIoError("not a byzfuse dataset (bad header line)");

    std::ostringstream meta_text;
    bool found_records = false;
    while (std::getline(in, line)) {
        if (line == kRecordsLine) {
            found_records = true;
            break;
        }
        meta_text << line << '\n';
    }
    if (!found_records) throw DatasetIoError("missing records marker");

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_text.str());
    } catch (const nlohmann::json::exception& e) {
        throw DatasetIoError(std::string("bad metadata: ") + e.what());
    }
    if (meta.value("schema_version", 0) != 1)
        throw DatasetIoError("unsupported dataset schema version");

    Dataset ds;
    ds.master_seed = meta.at("master_seed").get<std::uint64_t>();
    ds.configs = meta.at("configs").get<std::vector<ScenarioConfig>>();
    const auto expected = meta.at("sample_count").get<std::size_t>();
    const auto m = meta.at("m").get<std::size_t>();
    const auto n = meta.at("n").get<std::size_t>();

    ds.samples.reserve(expected);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string label, truth, reports, fake;
        if (!std::getline(fields, label, '\t') || !std::getline(fields, truth, '\t') ||
            !std::getline(fields, reports, '\t') || !std::getline(fields, fake))
            throw DatasetIoError("malformed record line");
        if (truth.size() != m || reports.size() != m * n)
            throw DatasetIoError("record dimensions disagree with metadata");
        if (!ds.find_config(label)) throw DatasetIoError("record references unknown config '" + label + "'");
        std::vector<Bit> bits(reports.size());
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (reports[i] != '0' && reports[i] != '1')
                throw DatasetIoError("report bits must be 0/1");
            bits[i] = static_cast<Bit>(reports[i] - '0');
        }
        std::optional<StateVector> fake_seq;
        if (fake != "-") fake_seq = StateVector::from_string(fake);
        ds.samples.push_back(LabeledSample{ReportMatrix(m, n, std::move(bits)),
                                           StateVector::from_string(truth), label,
                                           std::move(fake_seq)});
    }
    if (ds.samples.size() != expected)
        throw DatasetIoError("sample count disagrees with metadata");
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetIoError("cannot open: " + path.string());
    return read_dataset(in);
}

}  // namespace byzfuse
