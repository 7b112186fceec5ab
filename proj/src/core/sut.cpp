#include "sut.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <random>
#include <thread>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

const char *HistoryPolicyName(HistoryPolicy p) {
  return p == HistoryPolicy::kGold ? "gold" : "self_generated";
}

HistoryPolicy ParseHistoryPolicy(std::string_view name) {
  std::string n = text::Fold(name);
  if (n == "self_generated" || n == "self") return HistoryPolicy::kSelfGenerated;
  if (n == "gold") return HistoryPolicy::kGold;
  throw Error(ErrorKind::kConfig, "unknown history policy '" + std::string(name) + "'");
}

const std::string &DefaultSystemInstructions() {
  static const std::string kText =
      "You are a question answering assistant in a multi-turn conversation. "
      "Keep every answer short and precise: reply with the answer phrase only, "
      "without explanation. If a question is ambiguous or cannot be answered "
      "from the conversation so far, answer with 'Unknown'.";
  return kText;
}

bool InstructionsValid(const std::string &instructions) {
  std::string f = text::Fold(instructions);
  return instructions.find("Unknown") != std::string::npos &&
         f.find("short") != std::string::npos && f.find("precise") != std::string::npos;
}

HttpResponder::HttpResponder(const SutConfig &config)
    : client_([&] {
        HttpChatOptions o;
        o.endpoint = config.endpoint;
        o.model = config.model;
        o.api_key = config.api_key;
        o.temperature = config.temperature;
        o.max_retries = config.max_retries;
        o.backoff_seconds = config.backoff_seconds;
        o.timeout_seconds = config.timeout_seconds;
        return o;
      }()) {}

std::string HttpResponder::Respond(const std::vector<ChatMessage> &messages,
                                   const AnnotatedRound &, const std::string &) {
  ChatRequest req;
  req.messages = messages;
  return client_.Complete(req);
}

std::string DefectProfile::ToString() const {
  switch (kind) {
    case DefectKind::kOracle: return "oracle";
    case DefectKind::kAmnesiac: return "amnesiac:" + std::to_string(window);
    case DefectKind::kStubborn: return "stubborn_never_unknown";
    case DefectKind::kParrot: return "parrot_repeat_last";
    case DefectKind::kRandomToken: return "random_token:" + std::to_string(seed);
  }
  return "?";
}

DefectProfile ParseDefectProfile(std::string_view spec) {
  std::string s = text::Fold(spec);
  std::string name = s;
  std::optional<std::string> arg;
  if (auto colon = s.find(':'); colon != std::string::npos) {
    name = s.substr(0, colon);
    arg = s.substr(colon + 1);
  }
  auto number = [&](const char *what) -> long long {
    try {
      size_t used = 0;
      long long v = std::stoll(*arg, &used);
      if (used != arg->size() || v < 0) throw std::invalid_argument(*arg);
      return v;
    } catch (const std::exception &) {
      throw Error(ErrorKind::kConfig, std::string("bad ") + what + " in mock profile '" +
                                          std::string(spec) + "'");
    }
  };
  DefectProfile p;
  if (name == "oracle") {
    p.kind = DefectKind::kOracle;
  } else if (name == "amnesiac") {
    p.kind = DefectKind::kAmnesiac;
    if (arg) p.window = static_cast<int>(number("window"));
  } else if (name == "stubborn" || name == "stubborn_never_unknown") {
    p.kind = DefectKind::kStubborn;
    if (arg) p.seed = static_cast<uint64_t>(number("seed"));
  } else if (name == "parrot" || name == "parrot_repeat_last") {
    p.kind = DefectKind::kParrot;
  } else if (name == "random_token" || name == "random") {
    p.kind = DefectKind::kRandomToken;
    if (arg) p.seed = static_cast<uint64_t>(number("seed"));
  } else {
    throw Error(ErrorKind::kConfig, "unknown mock profile '" + std::string(spec) + "'");
  }
  if (arg && p.kind != DefectKind::kAmnesiac && p.kind != DefectKind::kStubborn &&
      p.kind != DefectKind::kRandomToken) {
    throw Error(ErrorKind::kConfig, "mock profile '" + name + "' takes no argument");
  }
  return p;
}

const std::vector<std::string> &MockVocabulary() {
  static const std::vector<std::string> kWords = {
      "Paris",  "blue",   "seven",  "river",   "Napoleon", "copper", "winter",
      "violin", "Berlin", "eleven", "granite", "falcon",   "orange", "harbor"};
  return kWords;
}

namespace {

std::string SeededWord(uint64_t seed, const std::string &dialogue_id, int new_index) {
  std::mt19937_64 rng(MixSeed(DialogueSeed(seed, dialogue_id) + static_cast<uint64_t>(new_index)));
  const auto &words = MockVocabulary();
  std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
  return words[pick(rng)];
}

const std::string &Require(const std::optional<std::string> &expected, const DefectProfile &p) {
  if (!expected) {
    throw Error(ErrorKind::kValidation,
                "mock profile " + p.ToString() + " needs an expected answer");
  }
  return *expected;
}

}  // namespace

std::string MockRespond(const DefectProfile &profile, const AnnotatedRound &round,
                        const std::optional<std::string> &expected,
                        const std::optional<std::string> &previous,
                        const std::string &dialogue_id) {
  const int index = round.round.provenance.new_index;
  switch (profile.kind) {
    case DefectKind::kOracle:
      return Require(expected, profile);
    case DefectKind::kAmnesiac: {
      const std::string &e = Require(expected, profile);
      if (round.antecedent_distance && *round.antecedent_distance > profile.window) {
        return std::string(kUnknownAnswer);
      }
      return e;
    }
    case DefectKind::kStubborn: {
      const std::string &e = Require(expected, profile);
      if (round.verdict.answerable()) return e;
      return SeededWord(profile.seed, dialogue_id, index);
    }
    case DefectKind::kParrot:
      if (previous) return *previous;
      return Require(expected, profile);
    case DefectKind::kRandomToken:
      return SeededWord(profile.seed, dialogue_id, index);
  }
  throw Error(ErrorKind::kInternal, "unhandled mock profile");
}

std::string MockResponder::Respond(const std::vector<ChatMessage> &messages,
                                   const AnnotatedRound &round,
                                   const std::string &dialogue_id) {
  std::optional<std::string> previous;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "assistant") {
      previous = it->content;
      break;
    }
  }
  std::optional<std::string> expected;
  if (!round.expected.text.empty()) expected = round.expected.text;
  return MockRespond(profile_, round, expected, previous, dialogue_id);
}

std::string TrimAnswer(std::string_view text) {
  auto strip = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '`';
  };
  size_t b = 0, e = text.size();
  while (b < e && strip(text[b])) ++b;
  while (e > b && strip(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

DialogueTranscript RunDialogue(Responder &responder, const AnnotatedDialogue &dialogue,
                               const SutConfig &config) {
  DialogueTranscript t;
  t.dialogue_id = dialogue.dialogue.source;
  t.kind = dialogue.dialogue.kind;
  std::vector<ChatMessage> history;
  history.push_back({"system", config.system_instructions});
  bool aborted = false;
  for (const AnnotatedRound &r : dialogue.rounds) {
    RoundOutcome o;
    o.dialogue_id = t.dialogue_id;
    o.kind = t.kind;
    o.new_index = r.round.provenance.new_index;
    o.origin_index = r.round.provenance.origin_index;
    o.question = r.round.question;
    o.answerable = r.expected.answerable;
    o.expected = r.expected.text;
    if (aborted) {
      o.status = OutcomeStatus::kAborted;
      t.outcomes.push_back(std::move(o));
      continue;
    }
    std::vector<ChatMessage> messages = history;
    messages.push_back({"user", r.round.question});
    try {
      std::string answer = TrimAnswer(responder.Respond(messages, r, t.dialogue_id));
      o.generated = answer;
      history.push_back({"user", r.round.question});
      history.push_back({"assistant", config.history_policy == HistoryPolicy::kGold
                                          ? r.expected.text
                                          : answer});
    } catch (const Error &e) {
      o.status = OutcomeStatus::kFailed;
      t.partial = true;
      t.error = "round " + std::to_string(o.new_index) + ": " + e.what();
      aborted = true;
    }
    t.outcomes.push_back(std::move(o));
  }
  return t;
}

std::vector<DialogueTranscript> RunDialogues(Responder &responder,
                                             const std::vector<AnnotatedDialogue> &dialogues,
                                             const SutConfig &config, int parallelism) {
  std::vector<DialogueTranscript> out(dialogues.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < dialogues.size(); i = next++) {
      out[i] = RunDialogue(responder, dialogues[i], config);
    }
  };
  int n = std::clamp(parallelism, 1, std::max(1, static_cast<int>(dialogues.size())));
  if (n == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> threads;
  for (int i = 0; i < n; ++i) threads.emplace_back(worker);
  for (std::thread &th : threads) th.join();
  return out;
}

}  // namespace mortar
