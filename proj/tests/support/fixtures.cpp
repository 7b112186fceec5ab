#include "fixtures.hpp"

#include <algorithm>

#include "mock_llm.hpp"
#include "prompts.hpp"

namespace mortar::testing {

std::string FixturePath(const std::string &name) {
  return std::string(MORTAR_FIXTURE_DIR) + "/" + name;
}

InfoGraph Graph(const std::vector<Ref> &entities, const std::vector<RelRef> &relations) {
  InfoGraph g;
  for (const auto &[type, name] : entities) g.AddEntity({name, type, "", {}});
  for (const RelRef &r : relations) {
    g.AddRelationUnchecked({EntityKey::Of(r.source.first, r.source.second),
                            EntityKey::Of(r.target.first, r.target.second), r.description});
  }
  return g;
}

Dialogue MakeDialogue(const std::string &id,
                      const std::vector<std::pair<std::string, std::string>> &qa,
                      std::optional<std::string> story) {
  Dialogue d;
  d.dialogue_id = id;
  d.story = std::move(story);
  int i = 0;
  for (const auto &[q, a] : qa) d.rounds.push_back({++i, q, a});
  return d;
}

ScriptedDialogue Scripted(const std::string &id, const std::vector<ScriptedRound> &rounds,
                          std::optional<std::string> story) {
  ScriptedDialogue s;
  std::vector<std::pair<std::string, std::string>> qa;
  for (const ScriptedRound &r : rounds) qa.emplace_back(r.question, r.answer);
  s.dialogue = MakeDialogue(id, qa, std::move(story));
  s.extraction.dialogue_id = id;
  for (const ScriptedRound &r : rounds) {
    s.extraction.rounds.push_back({r.question_graph, r.full_graph, r.answer_graph});
    s.extraction.whole = GraphUnion(s.extraction.whole, r.full_graph);
    s.extraction.whole = GraphUnion(s.extraction.whole, r.answer_graph);
    s.extraction.whole = GraphUnion(s.extraction.whole, r.question_graph);
    s.extraction.decontextualized.push_back({r.question, r.answer});
  }
  return s;
}

Dialogue TeaDialogue() {
  return LoadDataset(FixturePath("tea_dialogue.json"), DatasetFormat::kGeneric).dialogues.at(0);
}

DialogueExtraction TeaExtraction() {
  auto client = MockChatClient::FromFile(FixturePath("tea_mock.json"));
  TemplateSet templates = TemplateSet::Defaults();
  ExtractionPipeline pipeline(*client, templates);
  return pipeline.Run(TeaDialogue());
}

ScriptedDialogue ShelleyDialogue() {
  Ref book{"Book", "Frankenstein"}, shelley{"Person", "Mary Shelley"};
  Ref london{"City", "London"}, big_ben{"Landmark", "Big Ben"};
  return Scripted("shelley",
                  {{"Who wrote Frankenstein?", "Mary Shelley", Graph({book}), Graph({book}),
                    Graph({shelley})},
                   {"Where was she born?", "London", Graph({}), Graph({shelley}), Graph({london})},
                   {"Which city hosts Big Ben?", "London", Graph({big_ben}), Graph({big_ben}),
                    Graph({london})}});
}

ScriptedDialogue ChainDialogue() {
  Ref volcano{"Mountain", "Etna"}, sicily{"Island", "Sicily"};
  Ref opera{"Building", "Teatro Massimo"}, palermo{"City", "Palermo"};
  Ref lemon{"Fruit", "lemon"};
  return Scripted(
      "chain",
      {{"Is Etna an active volcano?", "yes, very active", Graph({volcano}), Graph({volcano}),
        Graph({})},
       {"Where is the Teatro Massimo?", "Palermo", Graph({opera}), Graph({opera}),
        Graph({palermo})},
       {"Which fruit is Sicily famous for?", "the lemon", Graph({sicily}), Graph({sicily}),
        Graph({lemon})},
       {"How tall is the volcano now?", "3357 metres", Graph({}), Graph({volcano}),
        Graph({})}});
}

std::vector<ScriptedDialogue> DefectCorpus() {
  std::vector<ScriptedDialogue> corpus;
  ScriptedDialogue tea;
  tea.dialogue = TeaDialogue();
  tea.extraction = TeaExtraction();
  corpus.push_back(std::move(tea));
  corpus.push_back(ShelleyDialogue());
  corpus.push_back(ChainDialogue());
  Ref moon{"Moon", "Moon"}, armstrong{"Person", "Neil Armstrong"}, y1969{"Time", "1969"};
  corpus.push_back(Scripted(
      "moon",
      {{"Who first walked on the Moon?", "Neil Armstrong", Graph({moon}), Graph({moon}),
        Graph({armstrong})},
       {"In which year did he do it?", "1969", Graph({}), Graph({armstrong, moon}),
        Graph({y1969})},
       {"What did he say?", "one small step for man", Graph({}), Graph({armstrong}), Graph({})},
       {"How far away is the Moon?", "384400 km", Graph({moon}), Graph({moon}), Graph({})}}));
  return corpus;
}

AnnotatedDialogue AnnotateOrigins(const Dialogue &d, const DialogueExtraction &x,
                                  PerturbationKind kind, const std::vector<int> &origins) {
  PerturbedDialogue pd = FromOrigins(d, kind, origins);
  HeuristicCoref coref;
  return AssignExpected(pd, TagDialogue(pd, d, x, coref), d);
}

Dialogue RandomDialogue(std::mt19937_64 &rng, int rounds, const std::string &id) {
  static const std::vector<std::string> kWords = {"river", "king", "tower", "song", "city",
                                                  "battle", "ship", "poem", "bridge", "star"};
  std::uniform_int_distribution<size_t> pick(0, kWords.size() - 1);
  Dialogue d;
  d.dialogue_id = id;
  for (int i = 1; i <= rounds; ++i) {
    d.rounds.push_back({i, "q" + std::to_string(i) + " which " + kWords[pick(rng)] + "?",
                        "a" + std::to_string(i) + " " + kWords[pick(rng)]});
  }
  return d;
}

FlatGraph Flatten(const InfoGraph &g) {
  FlatGraph f;
  auto id = [](const EntityKey &k) { return k.type + "|" + k.name; };
  for (const auto &[k, e] : g.entities()) f.entities.insert(id(k));
  for (const auto &[k, r] : g.relations()) {
    f.relations.insert({id(k.source), id(k.target), k.description});
  }
  return f;
}

namespace {

bool Covers(const FlatGraph &context, const FlatGraph &question, const FlatGraph &full) {
  for (const std::string &e : full.entities) {
    if (!question.entities.count(e) && !context.entities.count(e)) return false;
  }
  for (const auto &r : full.relations) {
    if (question.relations.count(r) || context.relations.count(r)) continue;
    bool src = context.entities.count(std::get<0>(r)) > 0;
    bool dst = context.entities.count(std::get<1>(r)) > 0;
    if (!(src && dst)) return false;
  }
  return true;
}

}  // namespace

VerdictStatus BruteForceOntology(const FlatGraph &question, const FlatGraph &full,
                                 const FlatGraph &context) {
  if (question.entities == full.entities && question.relations == full.relations) {
    return VerdictStatus::kSelfResolvable;
  }
  return Covers(context, question, full) ? VerdictStatus::kContextResolved
                                         : VerdictStatus::kUnresolved;
}

std::optional<int> BruteForceAntecedentDistance(const std::vector<FlatGraph> &contributions,
                                                int position, const FlatGraph &question,
                                                const FlatGraph &full) {
  for (int w = 1; w < position; ++w) {
    FlatGraph window;
    for (int r = position - w; r < position; ++r) {
      const FlatGraph &c = contributions[static_cast<size_t>(r - 1)];
      window.entities.insert(c.entities.begin(), c.entities.end());
      window.relations.insert(c.relations.begin(), c.relations.end());
    }
    if (Covers(window, question, full)) return w;
  }
  return std::nullopt;
}

OntologyCase RandomOntologyCase(std::mt19937_64 &rng) {
  static const std::vector<Ref> kUniverse = {
      {"Person", "Ada"}, {"Person", "Alan"}, {"City", "London"}, {"City", "Paris"},
      {"Machine", "Engine"}, {"Time", "1843"}, {"Book", "Notes"}};
  static const std::vector<std::string> kVerbs = {"wrote", "visited", "built"};
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<size_t> verb(0, kVerbs.size() - 1);

  auto random_graph = [&](double p_entity, int max_relations) {
    std::vector<Ref> es;
    for (const Ref &r : kUniverse) {
      if (std::bernoulli_distribution(p_entity)(rng)) es.push_back(r);
    }
    std::vector<RelRef> rs;
    if (es.size() >= 2) {
      std::uniform_int_distribution<size_t> pick(0, es.size() - 1);
      int n = std::uniform_int_distribution<int>(0, max_relations)(rng);
      for (int i = 0; i < n; ++i) {
        size_t a = pick(rng), b = pick(rng);
        if (a != b) rs.push_back({es[a], es[b], kVerbs[verb(rng)]});
      }
    }
    return std::make_pair(es, rs);
  };

  OntologyCase c;
  auto [full_e, full_r] = random_graph(0.5, 3);
  if (full_e.empty()) full_e.push_back(kUniverse[0]);
  c.full = Graph(full_e, full_r);
  std::vector<Ref> q_e;
  for (const Ref &r : full_e) {
    if (coin(rng)) q_e.push_back(r);
  }
  std::vector<RelRef> q_r;
  for (const RelRef &r : full_r) {
    bool ends = std::find(q_e.begin(), q_e.end(), r.source) != q_e.end() &&
                std::find(q_e.begin(), q_e.end(), r.target) != q_e.end();
    if (ends && coin(rng)) q_r.push_back(r);
  }
  c.question = Graph(q_e, q_r);
  int rounds = std::uniform_int_distribution<int>(0, 5)(rng);
  for (int i = 0; i < rounds; ++i) {
    auto [e, r] = random_graph(0.3, 2);
    c.prior.push_back(Graph(e, r));
  }
  return c;
}

}  // namespace mortar::testing
