#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rpgkit/game.hpp"
#include "rpgkit/gateway.hpp"

namespace rpgkit {

struct JudgeFormatError : std::runtime_error {
    explicit JudgeFormatError(const std::string& what) : std::runtime_error(what) {}
};

enum class FactLabel { align, contradict, neutral };

struct FactJudgment {
    std::string fact_id;
    FactLabel label = FactLabel::neutral;
    std::string explanation;
};

enum class RubricKind { diversity, relevance, understandability };

struct RubricScore {
    RubricKind rubric = RubricKind::diversity;
    int score = 1;  // 1..5
    std::string reason;
};

struct TipiRatings {
    std::array<int, 10> ratings{};  // items A..J, each 1..7
};

struct Big5Scores {
    double openness = 0, conscientiousness = 0, extraversion = 0, agreeableness = 0,
           neuroticism = 0;
};

// ---------------------------------------------------------------------------
// Scoring math (pure)

// #align / (#align + #contradict); 1.0 when nothing aligns or contradicts.
double score_fac(const std::vector<FactJudgment>& judgments);

// (s - 1) / 4 for a 1..5 rating.
double score_int(int rating);

// mean of the three rubric scores, normalized the same way.
double score_act(const std::array<RubricScore, 3>& rubrics);

// Raw Big Five scores from the ten inventory items; each lands in [2,14].
Big5Scores tipi_to_big5(const TipiRatings& r);

// Scales raw scores to [1,5] via (x+1)/3, takes per-trait distances to the
// game-declared rates (clamped into [1,5]), and maps the distance norm to
// [0,1]: 1 - sqrt(sum d^2) / (4*sqrt(5)).
double per_score(const Big5Scores& raw, const Big5Traits& game_traits);

// Direct variant: five 1..5 alignment ratings, averaged after (s-1)/4.
double per_direct(const std::array<int, 5>& trait_ratings);

// ---------------------------------------------------------------------------
// Prompts

enum class JudgeKind { fac, interestingness, act, tipi, per_direct };

struct JudgeContext {
    std::string npc_name;
    std::vector<std::string> facts;           // fac
    std::string game_content;                 // fac / int / tipi / per_direct
    std::string game_json;                    // act
    std::string history;                      // act
    std::array<std::string, 3> choices{};     // act
    RubricKind rubric = RubricKind::diversity;  // act
    std::string npc_personality;              // per_direct
};

std::vector<ChatMessage> build_judge_prompt(JudgeKind kind, const JudgeContext& ctx);

// ---------------------------------------------------------------------------
// Response parsing. All throw JudgeFormatError on malformed replies.

std::vector<FactJudgment> parse_fac_response(const std::string& reply,
                                             const std::vector<std::string>& fact_ids);
int parse_int_response(const std::string& reply);
RubricScore parse_act_response(const std::string& reply, RubricKind rubric);
TipiRatings parse_tipi_response(const std::string& reply);
std::array<int, 5> parse_perd_response(const std::string& reply);

// ---------------------------------------------------------------------------
// Judge client: one call, one corrective re-ask on a malformed reply, then
// JudgeFormatError propagates.

class JudgeClient {
public:
    JudgeClient(Backend& backend, std::string model) : backend_(&backend), model_(std::move(model)) {}

    double temperature = 0.0;
    int max_tokens = 2048;

    // validate must throw JudgeFormatError if the reply is unusable.
    std::string ask(std::vector<ChatMessage> prompt,
                    const std::function<void(const std::string&)>& validate);

    const std::string& model() const { return model_; }

private:
    Backend* backend_;
    std::string model_;
};

// Appends ACT/INT (per parsed round) and FAC/PER/PER^d (per trajectory)
// annotation records to the trajectory file. Items that already carry an
// annotation are skipped, so reruns resume where they stopped.
struct JudgeRunStats {
    int annotated = 0;
    int skipped = 0;
    int failed = 0;
};

JudgeRunStats judge_trajectory_file(const std::string& path, JudgeClient& judge);

}  // namespace rpgkit
