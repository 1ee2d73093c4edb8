#include "rpgkit/judge.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "rpgkit/simulation.hpp"
#include "rpgkit/util.hpp"

namespace rpgkit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scoring math

double score_fac(const std::vector<FactJudgment>& judgments) {
    size_t align = 0, contradict = 0;
    for (const auto& j : judgments) {
        if (j.label == FactLabel::align) ++align;
        else if (j.label == FactLabel::contradict) ++contradict;
    }
    if (align + contradict == 0) return 1.0;  // nothing contradicted
    return double(align) / double(align + contradict);
}

double score_int(int rating) {
    if (rating < 1 || rating > 5)
        throw JudgeFormatError("interestingness rating out of range: " + std::to_string(rating));
    return double(rating - 1) / 4.0;
}

double score_act(const std::array<RubricScore, 3>& rubrics) {
    double sum = 0;
    for (const auto& r : rubrics) {
        if (r.score < 1 || r.score > 5)
            throw JudgeFormatError("rubric score out of range: " + std::to_string(r.score));
        sum += r.score;
    }
    return (sum / 3.0 - 1.0) / 4.0;
}

Big5Scores tipi_to_big5(const TipiRatings& r) {
    // items A..J at indices 0..9
    const auto& t = r.ratings;
    Big5Scores s;
    s.openness = t[4] + 8 - t[9];           // E + 8 - J
    s.conscientiousness = t[2] + 8 - t[7];  // C + 8 - H
    s.extraversion = t[0] + 8 - t[5];       // A + 8 - F
    s.agreeableness = t[6] + 8 - t[1];      // G + 8 - B
    s.neuroticism = t[8] + 8 - t[3];        // I + 8 - D
    return s;
}

namespace {

double clamp_rate(double rate, const char* trait) {
    if (rate < 1.0 || rate > 5.0) {
        std::fprintf(stderr, "warning: game trait %s rate %.3f outside [1,5], clamping\n", trait,
                     rate);
        return rate < 1.0 ? 1.0 : 5.0;
    }
    return rate;
}

}  // namespace

double per_score(const Big5Scores& raw, const Big5Traits& game_traits) {
    auto scaled = [](double x) { return (x + 1.0) / 3.0; };
    double d_o = std::abs(scaled(raw.openness) - clamp_rate(game_traits.openness.rate, "openness"));
    double d_c = std::abs(scaled(raw.conscientiousness) -
                          clamp_rate(game_traits.conscientiousness.rate, "conscientiousness"));
    double d_e = std::abs(scaled(raw.extraversion) -
                          clamp_rate(game_traits.extraversion.rate, "extraversion"));
    double d_a = std::abs(scaled(raw.agreeableness) -
                          clamp_rate(game_traits.agreeableness.rate, "agreeableness"));
    double d_n = std::abs(scaled(raw.neuroticism) -
                          clamp_rate(game_traits.neuroticism.rate, "neuroticism"));
    double sum_sq = d_o * d_o + d_c * d_c + d_e * d_e + d_a * d_a + d_n * d_n;
    return 1.0 - std::sqrt(sum_sq) / (4.0 * std::sqrt(5.0));
}

double per_direct(const std::array<int, 5>& trait_ratings) {
    double sum = 0;
    for (int s : trait_ratings) {
        if (s < 1 || s > 5)
            throw JudgeFormatError("trait rating out of range: " + std::to_string(s));
        sum += double(s - 1) / 4.0;
    }
    return sum / 5.0;
}

// ---------------------------------------------------------------------------
// Prompt templates

namespace {

const char* kFacPrompt =
    R"(You are given a piece of narrative game content and a set of facts about a specific non-player character (NPC). Your task is to analyze whether each fact is supported, contradicted, or not addressed by the provided game content. For each fact, determine one of the following judgements based solely on the given game content:
- "align": The game content supports or is consistent with the fact.
- "contradict": The game content directly conflicts with or contradicts the fact.
- "neutral": The game content is unrelated or does not provide enough information to judge the fact.
Please disregard prior knowledge and analyze the NPC purely based on the game content and the facts.

**NPC**: {main_npc_name}

**Game Content**:

{game_content}

**Facts**

{main_npc_facts}

**Output Format**:
Return the results as a JSON array, where each element is an object with:
- fact_id: the corresponding fact's ID.
- judgement: one of "align", "contradict", or "neutral".
- explanation: a brief explanation for your judgment, referencing specific parts of the game content if applicable.
The return json array should follow this json schema:
{schema}

**Example Response**:
{example})";

const char* kFacSchema =
    R"({"type": "array", "items": {"type": "object", "required": ["fact_id", "judgement"], "properties": {"fact_id": {"type": "string"}, "judgement": {"enum": ["align", "contradict", "neutral"]}, "explanation": {"type": "string"}}}})";

const char* kFacExample =
    R"([{"fact_id": "F1", "judgement": "align", "explanation": "The opening scene shows exactly this."}, {"fact_id": "F2", "judgement": "neutral", "explanation": "The content never touches this."}])";

const char* kTipiPrompt =
    R"(You will be given information about a character. Here are a number of personality traits that may or may not apply to the character. Please write a number to each statement to indicate the extent to which you agree or disagree with that statement. You should rate the extent to which the pair of traits applies to the character, even if one characteristic applies more strongly than the other.

For the ratings:
- 1: Disagree strongly
- 2: Disagree moderately
- 3: Disagree a little
- 4: Neither agree nor disagree
- 5: Agree a little
- 6: Agree moderately
- 7: Agree strongly

Please give your ratings for the following 10 statements.

I see the character as:
A. Extraverted, enthusiastic.
B. Critical, quarrelsome.
C. Dependable, self-disciplined.
D. Anxious, easily upset.
E. Open to new experiences, complex.
F. Reserved, quiet.
G. Sympathetic, warm.
H. Disorganized, careless.
I. Calm, emotionally stable.
J. Conventional, uncreative

Please return ratings for all 10 traits in a dictionary following this schema:
{schema}

Please give your ratings for the following character.
{character})";

const char* kTipiSchema =
    R"({"type": "object", "required": ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"], "properties": {"A": {"type": "integer", "minimum": 1, "maximum": 7}, "B": {"type": "integer", "minimum": 1, "maximum": 7}, "C": {"type": "integer", "minimum": 1, "maximum": 7}, "D": {"type": "integer", "minimum": 1, "maximum": 7}, "E": {"type": "integer", "minimum": 1, "maximum": 7}, "F": {"type": "integer", "minimum": 1, "maximum": 7}, "G": {"type": "integer", "minimum": 1, "maximum": 7}, "H": {"type": "integer", "minimum": 1, "maximum": 7}, "I": {"type": "integer", "minimum": 1, "maximum": 7}, "J": {"type": "integer", "minimum": 1, "maximum": 7}}})";

const char* kPerdPrompt =
    R"(Assign a score from 1 to 5 to indicate how well the game narrative aligns with the main NPC's personality traits:
- Many Conflicts (1): The narrative frequently contradicts the NPC's personality.
- Some Conflicts (2): The narrative shows noticeable inconsistencies with the NPC's personality.
- Neutral (3): The narrative is only partially aligned or does not strongly reflect the NPC's personality.
- Strong Alignment (4): The narrative closely matches the NPC's personality, with only minor deviations or uncertainties.
- Perfect Alignment (5): The narrative flawlessly reflects the NPC's personality in every aspect, with no contradictions.

Please give one score for each personality trait, and provide a brief explanation for each score.

Game narrative:
{game_content}

NPC personality:
{npc_personality}

Please return a score as a json object following this schema:
{schema})";

const char* kPerdSchema =
    R"({"type": "object", "required": ["openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism"], "properties": {"openness": {"type": "object", "required": ["score"], "properties": {"score": {"type": "integer", "minimum": 1, "maximum": 5}, "explanation": {"type": "string"}}}, "conscientiousness": {"$ref": "#/properties/openness"}, "extraversion": {"$ref": "#/properties/openness"}, "agreeableness": {"$ref": "#/properties/openness"}, "neuroticism": {"$ref": "#/properties/openness"}}})";

const char* kIntPrompt =
    R"(Your task is to evaluate the **interestingness** of the following game content. Please give a score from 1 (least interesting) to 5 (most interesting), with a brief explanation of your rationale.


[[start of game content]]
{game_content}
[[end of game content]]

Please return your evaluation score in a json dictionary with the following format:
{schema}

Example output:
{example})";

const char* kIntSchema =
    R"({"type": "object", "required": ["score"], "properties": {"score": {"type": "integer", "minimum": 1, "maximum": 5}, "explanation": {"type": "string"}}})";

const char* kIntExample = R"({"score": 4, "explanation": "Vivid stakes and a surprising turn."})";

const char* kActPrompt =
    R"(Please act as an experienced RPG game player and evaluate the choices provided by the game engine, given the user-AI interaction history and the general game instruction outlining the basic game settings. You will be given the general game instruction, the interaction history, and the current choices offered by the game engine. Evaluate the choices based on the following rubric:

Please assess the choices provided by the game engine based on this rubric:

[[start of rubric]]
{rubric}
[[end of rubric]]

[[start of general game instruction]]
{game}
[[end of general game instruction]]

[[start of history]]
{history}
[[end of history]]

Please assess the choices provided by the game engine:

[[start of choices]]
{choices}
[[end of choices]]

Your output should be a JSON object structured as follows:
{
    "reason": <your reasoning here>
    "score": <score from 1 to 5 based on the rubric provided>
}
You must NOT output anything else other than this JSON object.)";

const char* kRubricDiversity =
    R"(Diversity: Does the set of choices provide distinct and varied options for the player?
1: The choices are nearly identical, offering no meaningful differences between them.
2: The choices have slight variations but are mostly redundant, leading to a limited sense of variety.
3: The choices exhibit some diversity but may still overlap in intent or outcome.
4: The choices are mostly distinct and provide meaningful differences that allow the player to explore different paths.
5: The choices are highly diverse, with each option offering unique and creative directions for the player.)";

const char* kRubricRelevance =
    R"(Relevance: Are the choices appropriate and contextually aligned with the story and scene?
1: The choices are entirely irrelevant, disconnected from the scene or story, and break immersion.
2: The choices have limited relevance, with some alignment to the story but containing jarring or out-of-place elements.
3: The choices are moderately relevant, generally aligning with the story but occasionally introducing inconsistencies.
4: The choices are mostly relevant, fitting well within the context and contributing meaningfully to the story.
5: The choices are fully relevant, seamlessly integrated into the story and enhancing the narrative experience.)";

const char* kRubricUnderstandability =
    R"(Understandability:  Are the choices clear, concise, and easy to understand for the player?
1: The choices are confusing, overly complex, or poorly worded, making them difficult to interpret.
2: The choices are somewhat understandable but may include ambiguous language or unnecessary complexity.
3: The choices are moderately clear, with minor ambiguities that require some interpretation.
4: The choices are clear and concise, easy to read, and free of significant ambiguity.
5: The choices are exceptionally clear and well-written, making them effortless to understand and act upon)";

std::string fill_placeholder(std::string text, const std::string& key, const std::string& value) {
    auto pos = text.find(key);
    if (pos != std::string::npos) text.replace(pos, key.size(), value);
    return text;
}

std::string rubric_text(RubricKind kind) {
    switch (kind) {
        case RubricKind::diversity: return kRubricDiversity;
        case RubricKind::relevance: return kRubricRelevance;
        case RubricKind::understandability: return kRubricUnderstandability;
    }
    return kRubricDiversity;
}

const char* rubric_name(RubricKind kind) {
    switch (kind) {
        case RubricKind::diversity: return "diversity";
        case RubricKind::relevance: return "relevance";
        case RubricKind::understandability: return "understandability";
    }
    return "diversity";
}

std::string render_facts(const std::vector<std::string>& facts) {
    std::string out;
    for (size_t i = 0; i < facts.size(); ++i)
        out += "F" + std::to_string(i + 1) + ": " + facts[i] + "\n";
    return out;
}

}  // namespace

std::vector<ChatMessage> build_judge_prompt(JudgeKind kind, const JudgeContext& ctx) {
    std::string text;
    switch (kind) {
        case JudgeKind::fac:
            text = fill_placeholder(kFacPrompt, "{main_npc_name}", ctx.npc_name);
            text = fill_placeholder(text, "{game_content}", ctx.game_content);
            text = fill_placeholder(text, "{main_npc_facts}", render_facts(ctx.facts));
            text = fill_placeholder(text, "{schema}", kFacSchema);
            text = fill_placeholder(text, "{example}", kFacExample);
            break;
        case JudgeKind::interestingness:
            text = fill_placeholder(kIntPrompt, "{game_content}", ctx.game_content);
            text = fill_placeholder(text, "{schema}", kIntSchema);
            text = fill_placeholder(text, "{example}", kIntExample);
            break;
        case JudgeKind::act: {
            json choices = json::array();
            for (const auto& c : ctx.choices) choices.push_back(c);
            text = fill_placeholder(kActPrompt, "{rubric}", rubric_text(ctx.rubric));
            text = fill_placeholder(text, "{game}", ctx.game_json);
            text = fill_placeholder(text, "{history}", ctx.history);
            text = fill_placeholder(text, "{choices}", choices.dump(2));
            break;
        }
        case JudgeKind::tipi:
            text = fill_placeholder(kTipiPrompt, "{schema}", kTipiSchema);
            text = fill_placeholder(text, "{character}", ctx.npc_name + "\n\n" + ctx.game_content);
            break;
        case JudgeKind::per_direct:
            text = fill_placeholder(kPerdPrompt, "{game_content}", ctx.game_content);
            text = fill_placeholder(text, "{npc_personality}", ctx.npc_personality);
            text = fill_placeholder(text, "{schema}", kPerdSchema);
            break;
    }
    return {ChatMessage{"user", std::move(text)}};
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// Judges wrap JSON in prose and fences; accept the reply as-is, a fenced
// body, or the largest balanced object/array substring.
json judge_extract_json(const std::string& reply) {
    json direct = json::parse(trim(reply), nullptr, false);
    if (!direct.is_discarded()) return direct;

    // fenced block bodies
    size_t pos = 0;
    while ((pos = reply.find("```", pos)) != std::string::npos) {
        size_t body_start = reply.find('\n', pos);
        if (body_start == std::string::npos) break;
        size_t close = reply.find("```", body_start);
        if (close == std::string::npos) break;
        json fenced = json::parse(trim(reply.substr(body_start, close - body_start)), nullptr,
                                  false);
        if (!fenced.is_discarded()) return fenced;
        pos = close + 3;
    }

    if (auto obj = extract_candidate_json(reply)) {
        json parsed = json::parse(*obj, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }

    // last resort: first balanced array
    size_t open = reply.find('[');
    while (open != std::string::npos) {
        int depth = 0;
        bool in_string = false, escape = false;
        for (size_t j = open; j < reply.size(); ++j) {
            char ch = reply[j];
            if (in_string) {
                if (escape) escape = false;
                else if (ch == '\\') escape = true;
                else if (ch == '"') in_string = false;
                continue;
            }
            if (ch == '"') in_string = true;
            else if (ch == '[') ++depth;
            else if (ch == ']' && --depth == 0) {
                json parsed = json::parse(reply.substr(open, j - open + 1), nullptr, false);
                if (!parsed.is_discarded()) return parsed;
                break;
            }
        }
        open = reply.find('[', open + 1);
    }
    throw JudgeFormatError("reply contains no parseable JSON");
}

int integral_score(const json& v, const char* what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == std::floor(d)) return int(d);
    }
    throw JudgeFormatError(std::string(what) + " must be an integer");
}

}  // namespace

std::vector<FactJudgment> parse_fac_response(const std::string& reply,
                                             const std::vector<std::string>& fact_ids) {
    json doc = judge_extract_json(reply);
    if (!doc.is_array()) throw JudgeFormatError("fact judgments must be a JSON array");
    std::map<std::string, FactJudgment> by_id;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("fact_id") || !item.contains("judgement"))
            throw JudgeFormatError("each fact judgment needs fact_id and judgement");
        FactJudgment fj;
        fj.fact_id = item["fact_id"].is_string() ? item["fact_id"].get<std::string>()
                                                 : item["fact_id"].dump();
        std::string label = item["judgement"].get<std::string>();
        if (label == "align") fj.label = FactLabel::align;
        else if (label == "contradict") fj.label = FactLabel::contradict;
        else if (label == "neutral") fj.label = FactLabel::neutral;
        else throw JudgeFormatError("unknown judgement '" + label + "'");
        if (item.contains("explanation") && item["explanation"].is_string())
            fj.explanation = item["explanation"].get<std::string>();
        if (!by_id.emplace(fj.fact_id, fj).second)
            throw JudgeFormatError("duplicate judgment for fact " + fj.fact_id);
    }
    std::vector<FactJudgment> out;
    for (const auto& id : fact_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw JudgeFormatError("missing judgment for fact " + id);
        out.push_back(it->second);
    }
    if (by_id.size() != fact_ids.size())
        throw JudgeFormatError("reply judges facts that were not asked about");
    return out;
}

int parse_int_response(const std::string& reply) {
    json doc = judge_extract_json(reply);
    if (!doc.is_object() || !doc.contains("score"))
        throw JudgeFormatError("reply must be an object with a score");
    int score = integral_score(doc["score"], "score");
    if (score < 1 || score > 5)
        throw JudgeFormatError("score out of range: " + std::to_string(score));
    return score;
}

RubricScore parse_act_response(const std::string& reply, RubricKind rubric) {
    json doc = judge_extract_json(reply);
    if (!doc.is_object() || !doc.contains("score"))
        throw JudgeFormatError("reply must be an object with a score");
    RubricScore rs;
    rs.rubric = rubric;
    rs.score = integral_score(doc["score"], "score");
    if (rs.score < 1 || rs.score > 5)
        throw JudgeFormatError("score out of range: " + std::to_string(rs.score));
    if (doc.contains("reason") && doc["reason"].is_string())
        rs.reason = doc["reason"].get<std::string>();
    return rs;
}

TipiRatings parse_tipi_response(const std::string& reply) {
    json doc = judge_extract_json(reply);
    if (!doc.is_object()) throw JudgeFormatError("inventory ratings must be a JSON object");
    TipiRatings out;
    const char* items = "ABCDEFGHIJ";
    for (int i = 0; i < 10; ++i) {
        std::string key(1, items[i]);
        if (!doc.contains(key)) throw JudgeFormatError("missing rating for item " + key);
        int v = integral_score(doc[key], key.c_str());
        if (v < 1 || v > 7)
            throw JudgeFormatError("rating for item " + key + " out of range: " +
                                   std::to_string(v));
        out.ratings[size_t(i)] = v;
    }
    return out;
}

std::array<int, 5> parse_perd_response(const std::string& reply) {
    json doc = judge_extract_json(reply);
    if (!doc.is_object()) throw JudgeFormatError("trait scores must be a JSON object");
    static const char* traits[5] = {"openness", "conscientiousness", "extraversion",
                                    "agreeableness", "neuroticism"};
    std::array<int, 5> out{};
    for (int i = 0; i < 5; ++i) {
        if (!doc.contains(traits[i]))
            throw JudgeFormatError(std::string("missing trait ") + traits[i]);
        const json& v = doc[traits[i]];
        int score;
        if (v.is_object() && v.contains("score")) score = integral_score(v["score"], traits[i]);
        else score = integral_score(v, traits[i]);
        if (score < 1 || score > 5)
            throw JudgeFormatError(std::string("trait ") + traits[i] + " score out of range: " +
                                   std::to_string(score));
        out[size_t(i)] = score;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JudgeClient

std::string JudgeClient::ask(std::vector<ChatMessage> prompt,
                             const std::function<void(const std::string&)>& validate) {
    ChatRequest req;
    req.model = model_;
    req.messages = prompt;
    req.temperature = temperature;
    req.max_tokens = max_tokens;

    std::string reply = backend_->chat(req);
    try {
        validate(reply);
        return reply;
    } catch (const JudgeFormatError& e) {
        auto retry = std::move(prompt);
        retry.push_back({"assistant", reply});
        retry.push_back({"user", std::string("Your previous reply could not be used: ") + e.what() +
                                     ". Reply again with only the JSON matching the schema."});
        req.messages = std::move(retry);
        std::string second = backend_->chat(req);
        validate(second);
        return second;
    }
}

// ---------------------------------------------------------------------------
// Trajectory annotation

namespace {

json messages_to_json(const std::vector<ChatMessage>& msgs) {
    json arr = json::array();
    for (const auto& m : msgs) arr.push_back({{"role", m.role}, {"content", m.content}});
    return arr;
}

struct RoundView {
    int index;
    std::string narration;
    std::array<std::string, 3> actions;
    int chosen = -1;
};

std::string history_for_round(const std::vector<RoundView>& rounds, size_t upto) {
    std::string out;
    for (size_t i = 0; i < upto; ++i) {
        const auto& r = rounds[i];
        out += "[ROUND " + std::to_string(r.index + 1) + "]\n" + r.narration + "\n";
        json actions = json::array();
        for (const auto& a : r.actions) actions.push_back(a);
        out += "Candidate actions: " + actions.dump() + "\n";
        out += "Player chose: " +
               (r.chosen >= 0 ? r.actions[size_t(r.chosen)] : std::string("(none)")) + "\n\n";
    }
    out += "[ROUND " + std::to_string(rounds[upto].index + 1) + "]\n" + rounds[upto].narration;
    return out;
}

}  // namespace

JudgeRunStats judge_trajectory_file(const std::string& path, JudgeClient& judge) {
    JudgeRunStats stats;
    TrajectoryFile file = read_trajectory_file(path);

    auto parsed = parse_game(file.header.at("game").dump());
    if (!parsed.game) throw std::runtime_error(path + ": header carries an invalid game");
    const GameConfig& game = *parsed.game;

    std::set<std::string> done;
    std::set<std::string> errored;
    for (const auto& a : file.annotations) {
        std::string key = a.value("metric", "") + "#" + std::to_string(a.value("round", -1));
        if (a["type"] == "annotation") done.insert(key);
        else errored.insert(key);
    }

    std::vector<RoundView> rounds;
    for (const auto& r : file.rounds) {
        if (!r.contains("narration")) continue;  // unparsed rounds cannot be judged
        RoundView v;
        v.index = r["index"].get<int>();
        v.narration = r["narration"].get<std::string>();
        auto acts = r["candidate_actions"];
        for (size_t i = 0; i < 3; ++i) v.actions[i] = acts[i].get<std::string>();
        if (r.contains("chosen_action_index") && r["chosen_action_index"].is_number())
            v.chosen = r["chosen_action_index"].get<int>();
        rounds.push_back(std::move(v));
    }

    auto emit = [&](json record) {
        record["type"] = "annotation";
        append_line(path, record.dump());
        ++stats.annotated;
    };
    auto emit_error = [&](const std::string& metric, int round, const std::string& error) {
        std::string key = metric + "#" + std::to_string(round);
        ++stats.failed;
        if (errored.count(key)) return;  // identical failure already on file
        json rec{{"type", "annotation_error"}, {"metric", metric}, {"round", round},
                 {"error", error}};
        append_line(path, rec.dump());
    };
    auto needs = [&](const std::string& metric, int round) {
        return !done.count(metric + "#" + std::to_string(round));
    };

    std::string game_json_text = file.header.at("game").dump(2);
    std::string all_narration;
    for (const auto& r : rounds) all_narration += r.narration + "\n\n";

    // per-round metrics first, in round order: ACT (three rubric calls), INT
    for (size_t i = 0; i < rounds.size(); ++i) {
        const auto& r = rounds[i];
        if (needs("ACT", r.index)) {
            try {
                std::array<RubricScore, 3> scores;
                json prompts = json::array(), replies = json::array();
                static const RubricKind kinds[3] = {RubricKind::diversity, RubricKind::relevance,
                                                    RubricKind::understandability};
                for (int k = 0; k < 3; ++k) {
                    JudgeContext ctx;
                    ctx.rubric = kinds[k];
                    ctx.game_json = game_json_text;
                    ctx.history = history_for_round(rounds, i);
                    ctx.choices = r.actions;
                    auto prompt = build_judge_prompt(JudgeKind::act, ctx);
                    std::string reply = judge.ask(
                        prompt, [&](const std::string& t) { parse_act_response(t, kinds[k]); });
                    scores[size_t(k)] = parse_act_response(reply, kinds[k]);
                    prompts.push_back(messages_to_json(prompt));
                    replies.push_back(reply);
                }
                json rubrics;
                for (const auto& s : scores)
                    rubrics[rubric_name(s.rubric)] = {{"score", s.score}, {"reason", s.reason}};
                emit(json{{"metric", "ACT"},
                          {"round", r.index},
                          {"value", score_act(scores)},
                          {"rubrics", rubrics},
                          {"prompts", prompts},
                          {"replies", replies}});
            } catch (const std::exception& e) {
                emit_error("ACT", r.index, e.what());
            }
        } else {
            ++stats.skipped;
        }

        if (needs("INT", r.index)) {
            try {
                JudgeContext ctx;
                ctx.game_content = r.narration;
                auto prompt = build_judge_prompt(JudgeKind::interestingness, ctx);
                std::string reply =
                    judge.ask(prompt, [](const std::string& t) { parse_int_response(t); });
                int rating = parse_int_response(reply);
                emit(json{{"metric", "INT"},
                          {"round", r.index},
                          {"value", score_int(rating)},
                          {"rating", rating},
                          {"prompts", json::array({messages_to_json(prompt)})},
                          {"replies", json::array({reply})}});
            } catch (const std::exception& e) {
                emit_error("INT", r.index, e.what());
            }
        } else {
            ++stats.skipped;
        }
    }

    if (rounds.empty()) return stats;  // nothing narrated: no trajectory-level judging either

    // trajectory-level metrics: FAC, PER (inventory based), PER^d
    const auto& facts = game.main_npc_description.additional_facts;
    if (needs("FAC", -1)) {
        try {
            if (facts.empty()) {
                emit(json{{"metric", "FAC"}, {"round", -1}, {"value", 1.0},
                          {"judgments", json::array()}, {"prompts", json::array()},
                          {"replies", json::array()}});
            } else {
                std::vector<std::string> ids;
                for (size_t i = 0; i < facts.size(); ++i) ids.push_back("F" + std::to_string(i + 1));
                JudgeContext ctx;
                ctx.npc_name = game.main_npc_name;
                ctx.facts = facts;
                ctx.game_content = all_narration;
                auto prompt = build_judge_prompt(JudgeKind::fac, ctx);
                std::string reply = judge.ask(
                    prompt, [&](const std::string& t) { parse_fac_response(t, ids); });
                auto judgments = parse_fac_response(reply, ids);
                json jj = json::array();
                for (const auto& fj : judgments) {
                    const char* label = fj.label == FactLabel::align ? "align"
                                        : fj.label == FactLabel::contradict ? "contradict"
                                                                            : "neutral";
                    jj.push_back({{"fact_id", fj.fact_id},
                                  {"judgement", label},
                                  {"explanation", fj.explanation}});
                }
                emit(json{{"metric", "FAC"},
                          {"round", -1},
                          {"value", score_fac(judgments)},
                          {"judgments", jj},
                          {"prompts", json::array({messages_to_json(prompt)})},
                          {"replies", json::array({reply})}});
            }
        } catch (const std::exception& e) {
            emit_error("FAC", -1, e.what());
        }
    } else {
        ++stats.skipped;
    }

    if (needs("PER", -1)) {
        try {
            JudgeContext ctx;
            ctx.npc_name = game.main_npc_name;
            ctx.game_content = all_narration;
            auto prompt = build_judge_prompt(JudgeKind::tipi, ctx);
            std::string reply =
                judge.ask(prompt, [](const std::string& t) { parse_tipi_response(t); });
            TipiRatings ratings = parse_tipi_response(reply);
            Big5Scores raw = tipi_to_big5(ratings);
            json ratings_json;
            const char* items = "ABCDEFGHIJ";
            for (int i = 0; i < 10; ++i)
                ratings_json[std::string(1, items[i])] = ratings.ratings[size_t(i)];
            emit(json{{"metric", "PER"},
                      {"round", -1},
                      {"value", per_score(raw, game.main_npc_description.big5)},
                      {"tipi", ratings_json},
                      {"big5_raw",
                       {{"openness", raw.openness},
                        {"conscientiousness", raw.conscientiousness},
                        {"extraversion", raw.extraversion},
                        {"agreeableness", raw.agreeableness},
                        {"neuroticism", raw.neuroticism}}},
                      {"prompts", json::array({messages_to_json(prompt)})},
                      {"replies", json::array({reply})}});
        } catch (const std::exception& e) {
            emit_error("PER", -1, e.what());
        }
    } else {
        ++stats.skipped;
    }

    if (needs("PERD", -1)) {
        try {
            json traits = file.header["game"]["main_npc_description"]["big5_personality_traits"];
            JudgeContext ctx;
            ctx.game_content = all_narration;
            ctx.npc_personality = traits.dump(2);
            auto prompt = build_judge_prompt(JudgeKind::per_direct, ctx);
            std::string reply =
                judge.ask(prompt, [](const std::string& t) { parse_perd_response(t); });
            auto ratings = parse_perd_response(reply);
            emit(json{{"metric", "PERD"},
                      {"round", -1},
                      {"value", per_direct(ratings)},
                      {"ratings",
                       {{"openness", ratings[0]},
                        {"conscientiousness", ratings[1]},
                        {"extraversion", ratings[2]},
                        {"agreeableness", ratings[3]},
                        {"neuroticism", ratings[4]}}},
                      {"prompts", json::array({messages_to_json(prompt)})},
                      {"replies", json::array({reply})}});
        } catch (const std::exception& e) {
            emit_error("PERD", -1, e.what());
        }
    } else {
        ++stats.skipped;
    }

    return stats;
}

}  // namespace rpgkit
