#include "byzfuse/serialize.hpp"

namespace byzfuse {

using nlohmann::json;

void to_json(json& j, const ChannelParams& c) {
    j = json{{"epsilon", c.epsilon}, {"p_mal", c.p_mal}};
}

void from_json(const json& j, ChannelParams& c) {
    j.at("epsilon").get_to(c.epsilon);
    j.at("p_mal").get_to(c.p_mal);
}

void to_json(json& j, const StatePrior& p) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IidPrior>) {
                j = json{{"type", "iid"}, {"p0", v.p0}};
            } else {
                j = json{{"type", "markov"}, {"rho", v.rho}, {"initial_p0", v.initial_p0}};
            }
        },
        p);
}

void from_json(const json& j, StatePrior& p) {
    const auto type = j.at("type").get<std::string>();
    if (type == "iid") {
        p = IidPrior{j.at("p0").get<double>()};
    } else if (type == "markov") {
        p = MarkovPrior{j.at("rho").get<double>(), j.at("initial_p0").get<double>()};
    } else {
        throw json::other_error::create(501, "unknown prior type: " + type, &j);
    }
}

void to_json(json& j, const HonestyModel& m) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                j = json{{"type", "independent_alpha"}, {"alpha", v.alpha}};
            } else if constexpr (std::is_same_v<T, FixedK>) {
                j = json{{"type", "fixed_k"}, {"k", v.k}};
            } else if constexpr (std::is_same_v<T, MaxEntropyBounded>) {
                j = json{{"type", "max_entropy_bounded"}, {"h", v.h}};
            } else {
                j = json{{"type", "unconstrained_max_entropy"}};
            }
        },
        m);
}

void from_json(const json& j, HonestyModel& m) {
    const auto type = j.at("type").get<std::string>();
    if (type == "independent_alpha") {
        m = IndependentAlpha{j.at("alpha").get<double>()};
    } else if (type == "fixed_k") {
        m = FixedK{j.at("k").get<int>()};
    } else if (type == "max_entropy_bounded") {
        m = MaxEntropyBounded{j.at("h").get<int>()};
    } else if (type == "unconstrained_max_entropy") {
        m = UnconstrainedMaxEntropy{};
    } else {
        throw json::other_error::create(501, "unknown honesty model: " + type, &j);
    }
}

void to_json(json& j, const AttackMode& a) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Unsynchronized>) {
                j = json{{"type", "unsynchronized"}};
            } else {
                j = json{{"type", "synchronized"}, {"fake_prior", v.fake_prior}};
            }
        },
        a);
}

void from_json(const json& j, AttackMode& a) {
    const auto type = j.at("type").get<std::string>();
    if (type == "unsynchronized") {
        a = Unsynchronized{};
    } else if (type == "synchronized") {
        a = Synchronized{j.at("fake_prior").get<StatePrior>()};
    } else {
        throw json::other_error::create(501, "unknown attack mode: " + type, &j);
    }
}

void to_json(json& j, const ScenarioConfig& c) {
    j = json{{"n", c.n},
             {"m", c.m},
             {"state_prior", c.state_prior},
             {"honesty_model", c.honesty_model},
             {"attack_mode", c.attack_mode},
             {"channel", c.channel},
             {"flip_noisy_observation", c.flip_noisy_observation},
             {"label", c.label}};
}

void from_json(const json& j, ScenarioConfig& c) {
    j.at("n").get_to(c.n);
    j.at("m").get_to(c.m);
    j.at("state_prior").get_to(c.state_prior);
    j.at("honesty_model").get_to(c.honesty_model);
    j.at("attack_mode").get_to(c.attack_mode);
    j.at("channel").get_to(c.channel);
    c.flip_noisy_observation = j.value("flip_noisy_observation", false);
    j.at("label").get_to(c.label);
}

}  // namespace byzfuse

namespace nlohmann {

byzfuse::StateVector adl_serializer<byzfuse::StateVector>::from_json(const json& j) {
    return byzfuse::StateVector::from_string(j.get<std::string>());
}

void adl_serializer<byzfuse::StateVector>::to_json(json& j, const byzfuse::StateVector& s) {
    j = s.to_string();
}

byzfuse::ReportMatrix adl_serializer<byzfuse::ReportMatrix>::from_json(const json& j) {
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const auto text = j.at("bits").get<std::string>();
    if (text.size() != m * n)
        throw json::other_error::create(501, "report bit count mismatch", &j);
    std::vector<byzfuse::Bit> bits(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
        bits[i] = static_cast<byzfuse::Bit>(text[i] - '0');
    return byzfuse::ReportMatrix(m, n, std::move(bits));
}

void adl_serializer<byzfuse::ReportMatrix>::to_json(json& j, const byzfuse::ReportMatrix& r) {
    std::string text(r.row_major().size(), '0');
    for (std::size_t i = 0; i < text.size(); ++i)
        text[i] = static_cast<char>('0' + r.row_major()[i]);
    j = json{{"m", r.rows()}, {"n", r.cols()}, {"bits", text}};
}

}  // namespace nlohmann
