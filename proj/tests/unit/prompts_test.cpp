#include "prompts.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "error.hpp"

namespace mortar {
namespace {

using nlohmann::json;

TEST(PromptsTest, SevenFunctionsHaveTemplates) {
  TemplateSet t = TemplateSet::Defaults();
  ASSERT_EQ(PipelineFunctionNames().size(), 7u);
  for (const std::string &name : PipelineFunctionNames()) {
    const PromptTemplate &p = t.Get(name);
    EXPECT_EQ(p.name, name);
    EXPECT_FALSE(p.body.empty());
    EXPECT_TRUE(p.output_schema.is_object());
  }
  EXPECT_EQ(t.Version().size(), 12u);
}

TEST(PromptsTest, RenderSubstitutesAndRejectsUnbound) {
  EXPECT_EQ(RenderTemplate("Topic: {topic}; {topic}!", {{"topic", "tea"}}), "Topic: tea; tea!");
  EXPECT_EQ(RenderTemplate(R"(Return {"topic": "..."})", {}), R"(Return {"topic": "..."})");
  try {
    RenderTemplate("{document}", {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  EXPECT_EQ(Placeholders("{b} {a} {b}"), (std::vector<std::string>{"b", "a"}));
}

TEST(PromptsTest, SchemaValidation) {
  json schema = {{"type", "object"},
                 {"required", {"items"}},
                 {"properties",
                  {{"items", {{"type", "array"}, {"minItems", 1},
                              {"items", {{"type", "string"}, {"minLength", 1}}}}},
                   {"mode", {{"enum", {"a", "b"}}}}}}};
  EXPECT_FALSE(ValidateSchema(json{{"items", {"x"}}}, schema).has_value());
  EXPECT_TRUE(ValidateSchema(json{{"items", json::array()}}, schema).has_value());
  EXPECT_TRUE(ValidateSchema(json{{"items", {""}}}, schema).has_value());
  EXPECT_TRUE(ValidateSchema(json{{"items", {1}}}, schema).has_value());
  EXPECT_TRUE(ValidateSchema(json{{"mode", "c"}, {"items", {"x"}}}, schema).has_value());
  EXPECT_TRUE(ValidateSchema(json::array(), schema).has_value());
}

TEST(PromptsTest, DirectoryOverridesBody) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mortar_prompts_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "topic_extraction.txt") << "Name the topic of: {document}";
  TemplateSet t = TemplateSet::LoadDirectory(dir.string());
  EXPECT_EQ(t.Get(fn::kTopic).body, "Name the topic of: {document}");
  EXPECT_NE(t.Version(), TemplateSet::Defaults().Version());

  std::ofstream(dir / "topic_extraction.txt") << "Bad {nonexistent_binding}";
  EXPECT_THROW(TemplateSet::LoadDirectory(dir.string()), Error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mortar
