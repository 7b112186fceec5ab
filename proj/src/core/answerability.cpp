#include "answerability.hpp"

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

const char *VerdictStatusName(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::kSelfResolvable: return "self_resolvable";
    case VerdictStatus::kContextResolved: return "context_resolved";
    case VerdictStatus::kStoryResolvable: return "story_resolvable";
    case VerdictStatus::kSemanticResolved: return "semantic_resolved";
    case VerdictStatus::kUnresolved: return "unresolved";
  }
  return "?";
}

VerdictStatus ParseVerdictStatus(std::string_view name) {
  for (VerdictStatus s : {VerdictStatus::kSelfResolvable, VerdictStatus::kContextResolved,
                          VerdictStatus::kStoryResolvable, VerdictStatus::kSemanticResolved,
                          VerdictStatus::kUnresolved}) {
    if (name == VerdictStatusName(s)) return s;
  }
  throw Error(ErrorKind::kParse, "unknown verdict '" + std::string(name) + "'");
}

InfoGraph Uncovered(const InfoGraph &missing, const InfoGraph &context) {
  InfoGraph out;
  for (const auto &[key, e] : missing.entities()) {
    if (!context.Contains(key)) out.AddEntity(e);
  }
  for (const auto &[key, r] : missing.relations()) {
    bool covered = context.Contains(key) ||
                   (context.Contains(r.source) && context.Contains(r.target));
    if (!covered) out.AddRelationUnchecked(r);
  }
  return out;
}

AnswerabilityVerdict CheckOntology(const InfoGraph &question_graph,
                                   const InfoGraph &full_graph,
                                   const InfoGraph &context) {
  AnswerabilityVerdict v;
  v.checks_run.insert(check::kOntology);
  InfoGraph difference = GraphDifference(full_graph, question_graph);
  if (difference.empty()) {
    v.status = VerdictStatus::kSelfResolvable;
    return v;
  }
  InfoGraph uncovered = Uncovered(difference, context);
  if (uncovered.empty()) {
    v.status = VerdictStatus::kContextResolved;
    return v;
  }
  v.status = VerdictStatus::kUnresolved;
  v.missing = std::move(uncovered);
  return v;
}

SemanticCheck CheckSemantic(const std::string &question,
                            const std::vector<std::string> &prior_rounds,
                            CoreferenceClient &resolver, const InfoGraph &known) {
  SemanticCheck out;
  out.had_pronouns = !FindPronouns(question).empty();
  if (!out.had_pronouns) return out;
  if (prior_rounds.empty()) {
    out.resolved = false;
    return out;
  }
  CorefResult res = resolver.Resolve(text::Join(prior_rounds, "\n"), question, known);
  out.low_confidence = res.low_confidence;
  for (const FocusMention &m : res.focus) {
    out.resolved = out.resolved && m.resolved;
  }
  return out;
}

bool CheckStory(const std::string &question, const std::optional<std::string> &story,
                const InfoGraph &missing, const InfoGraph &context,
                CoreferenceClient &resolver, const InfoGraph &known) {
  if (!story || text::Trim(*story).empty() || missing.entities().empty()) return false;
  std::vector<Mention> pronouns = FindPronouns(question);
  if (pronouns.empty()) return false;
  CorefResult res = resolver.Resolve(*story, "", known);

  std::set<EntityKey> resolved;
  for (const auto &[key, entity] : missing.entities()) {
    std::vector<std::string> surfaces = {entity.name};
    surfaces.insert(surfaces.end(), entity.aliases.begin(), entity.aliases.end());
    bool found = false;
    for (const auto &chain : res.chains) {
      bool names_entity = false;
      bool uses_question_pronoun = false;
      for (const Mention &m : chain) {
        for (const std::string &s : surfaces) {
          names_entity = names_entity || text::CollapseFold(m.text) == text::CollapseFold(s);
        }
        for (const Mention &p : pronouns) {
          uses_question_pronoun = uses_question_pronoun || text::Fold(m.text) == text::Fold(p.text);
        }
      }
      found = found || (names_entity && uses_question_pronoun);
    }
    if (!found) return false;
    resolved.insert(key);
  }
  for (const auto &[key, r] : missing.relations()) {
    auto ok = [&](const EntityKey &k) { return context.Contains(k) || resolved.count(k) > 0; };
    if (!ok(r.source) || !ok(r.target)) return false;
  }
  return true;
}

json AnnotatedDialogue::ToJson() const {
  json j = mortar::ToJson(dialogue);
  for (size_t i = 0; i < rounds.size(); ++i) {
    const AnnotatedRound &r = rounds[i];
    json &out = j["rounds"][i];
    json missing = json::array();
    for (const auto &[key, e] : r.verdict.missing.entities()) missing.push_back(key.ToString());
    for (const auto &[key, rel] : r.verdict.missing.relations()) {
      missing.push_back(key.source.ToString() + " -> " + key.target.ToString() + " (" +
                        key.description + ")");
    }
    out["answerable"] = r.expected.answerable;
    out["verdict"] = VerdictStatusName(r.verdict.status);
    out["expected_answer"] = r.expected.text;
    out["missing"] = missing;
    out["gold_answer"] = r.gold_answer;
    out["checks_run"] = r.verdict.checks_run;
    out["antecedent_distance"] = r.antecedent_distance ? json(*r.antecedent_distance) : json();
  }
  return j;
}

AnnotatedDialogue AnnotatedDialogue::FromJson(const json &j) {
  AnnotatedDialogue a;
  a.dialogue = PerturbedFromJson(j);
  try {
    for (size_t i = 0; i < a.dialogue.rounds.size(); ++i) {
      const json &r = j.at("rounds").at(i);
      AnnotatedRound out;
      out.round = a.dialogue.rounds[i];
      out.gold_answer = r.value("gold_answer", "");
      out.verdict.status = ParseVerdictStatus(r.at("verdict").get<std::string>());
      out.verdict.checks_run = r.value("checks_run", std::set<std::string>{});
      // Missing information is kept as display keys only.
      for (const json &m : r.value("missing", json::array())) {
        std::string s = m.get<std::string>();
        if (s.find(" -> ") != std::string::npos) continue;
        size_t colon = s.find(": ");
        if (colon == std::string::npos) continue;
        out.verdict.missing.AddEntity({s.substr(colon + 2), s.substr(0, colon), "", {}});
      }
      out.expected = {r.at("expected_answer").get<std::string>(),
                      r.at("answerable").get<bool>()};
      if (r.contains("antecedent_distance") && !r["antecedent_distance"].is_null()) {
        out.antecedent_distance = r["antecedent_distance"].get<int>();
      }
      a.rounds.push_back(std::move(out));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("annotated round: ") + e.what());
  }
  return a;
}

InfoGraph RoundContribution(const RoundGraphs &graphs) {
  return GraphUnion(graphs.question, graphs.answer);
}

std::vector<TaggedRound> TagDialogue(const PerturbedDialogue &pd,
                                     const Dialogue &original,
                                     const DialogueExtraction &extraction,
                                     CoreferenceClient &resolver) {
  auto graphs_of = [&](int origin) -> const RoundGraphs & {
    size_t i = static_cast<size_t>(origin - 1);
    if (origin < 1 || i >= extraction.rounds.size()) {
      throw Error(ErrorKind::kInternal, "no round graphs for " + original.dialogue_id +
                                            " round " + std::to_string(origin));
    }
    return extraction.rounds[i];
  };

  std::vector<InfoGraph> contributions;
  for (const PerturbedRound &r : pd.rounds) {
    contributions.push_back(RoundContribution(graphs_of(r.provenance.origin_index)));
  }
  ContextAccumulator context(std::move(contributions));

  std::vector<TaggedRound> tags;
  std::vector<std::string> prior_text;
  for (size_t i = 0; i < pd.rounds.size(); ++i) {
    const PerturbedRound &r = pd.rounds[i];
    int position = static_cast<int>(i) + 1;
    const RoundGraphs &g = graphs_of(r.provenance.origin_index);
    const InfoGraph &ctx = context.ContextBefore(position);

    TaggedRound tag;
    tag.verdict = CheckOntology(g.question, g.full, ctx);
    if (tag.verdict.status == VerdictStatus::kContextResolved) {
      InfoGraph needed = GraphDifference(g.full, g.question);
      for (int window = 1; window < position; ++window) {
        if (Uncovered(needed, context.WindowBefore(position, window)).empty()) {
          tag.antecedent_distance = window;
          break;
        }
      }
    }
    if (!tag.verdict.answerable()) {
      tag.verdict.checks_run.insert(check::kSemantic);
      SemanticCheck sem = CheckSemantic(r.question, prior_text, resolver, extraction.whole);
      if (sem.low_confidence) tag.verdict.checks_run.insert(check::kLowConfidence);
      if (sem.resolved) {
        tag.verdict.status = VerdictStatus::kSemanticResolved;
        tag.verdict.missing = InfoGraph();
      }
    }
    if (!tag.verdict.answerable() && original.story) {
      tag.verdict.checks_run.insert(check::kStory);
      if (CheckStory(r.question, original.story, tag.verdict.missing, ctx, resolver,
                     extraction.whole)) {
        tag.verdict.status = VerdictStatus::kStoryResolvable;
        tag.verdict.missing = InfoGraph();
      }
    }
    tags.push_back(std::move(tag));

    const QARound *origin = original.Round(r.provenance.origin_index);
    prior_text.push_back(r.question + " " + (origin ? origin->gold_answer : ""));
  }
  return tags;
}

AnnotatedDialogue AssignExpected(const PerturbedDialogue &pd,
                                 const std::vector<TaggedRound> &tags,
                                 const Dialogue &original) {
  if (tags.size() != pd.rounds.size()) {
    throw Error(ErrorKind::kInternal, "verdict count does not match rounds for " + pd.source);
  }
  AnnotatedDialogue out;
  out.dialogue = pd;
  for (size_t i = 0; i < pd.rounds.size(); ++i) {
    const PerturbedRound &r = pd.rounds[i];
    const QARound *origin = original.Round(r.provenance.origin_index);
    if (origin == nullptr) {
      throw Error(ErrorKind::kInternal, "origin round missing for " + pd.source);
    }
    AnnotatedRound a;
    a.round = r;
    a.gold_answer = origin->gold_answer;
    a.verdict = tags[i].verdict;
    a.antecedent_distance = tags[i].antecedent_distance;
    a.expected = a.verdict.answerable() ? ExpectedAnswer{origin->gold_answer, true}
                                        : ExpectedAnswer{kUnknownAnswer, false};
    out.rounds.push_back(std::move(a));
  }
  return out;
}

}  // namespace mortar
