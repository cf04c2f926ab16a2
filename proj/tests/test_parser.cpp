#include <fstream>

#include "doctest.h"
#include "fixture.hpp"
#include "semiq/ast.hpp"
#include "semiq/cli.hpp"

using namespace semiq;

namespace {

ParseError parse_error(const char* text) {
  try {
    parse_query(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("parsed: " << text);
  return ParseError("", {});
}

std::vector<std::string> golden() {
  std::ifstream in(fixture::golden_file());
  return read_batch(in);
}

}  // namespace

TEST_CASE("raw literal after a comparator") {
  auto t = tokenize("personCode=250285-10507");
  REQUIRE(t.size() == 4);
  CHECK(t[0].kind == TokenKind::Word);
  CHECK(t[0].text == "personCode");
  CHECK(t[1].kind == TokenKind::Symbol);
  CHECK(t[2].kind == TokenKind::Raw);
  CHECK(t[2].text == "250285-10507");
  CHECK(t[3].kind == TokenKind::End);
}

TEST_CASE("arithmetic stays arithmetic") {
  auto t = tokenize("dischargeTime-admissionTime>15d");
  CHECK(t[1].text == "-");
  CHECK(t[4].kind == TokenKind::Number);
  CHECK(t[4].text == "15d");
}

TEST_CASE("numbers keep leading zeros and temporal lexemes") {
  auto t = tokenize("code=02078 AND t>2015.06.17T10:45");
  CHECK(t[2].kind == TokenKind::Number);
  CHECK(t[2].text == "02078");
  CHECK(t[6].text == "2015.06.17T10:45");
}

TEST_CASE("keywords are case-insensitive") {
  CHECK(is_keyword("count"));
  CHECK(is_keyword("COUNT"));
  CHECK(is_keyword("Where"));
  CHECK_FALSE(is_keyword("Patient"));
  CHECK(parse_query("count patients").kind == Template::Count);
}

TEST_CASE("spans are byte offsets") {
  auto t = tokenize("COUNT  Patient");
  CHECK(t[1].span.offset == 7);
  CHECK(t[1].span.length == 7);
}

TEST_CASE("lexical errors") {
  CHECK(parse_error("COUNT Patient, WHERE name=\"abc").span().offset == 26);
  CHECK(std::string(parse_error("COUNT Patient #").what()).find("illegal character") != std::string::npos);
}

TEST_CASE("calls with and without parentheses") {
  QueryAst a = parse_query("COUNT Patient, WHERE birthDate.year()=2012");
  REQUIRE(a.where);
  CHECK(a.where->lhs->kind == Expr::Call);
  CHECK(a.where->lhs->text == "year");
  QueryAst b = parse_query("COUNT Patient, WHERE birthDate.year=2012");
  CHECK(b.where->lhs->kind == Expr::Path);
  CHECK(b.where->lhs->names == std::vector<std::string>{"birthDate", "year"});
  QueryAst c = parse_query("COUNT Patient, WHERE personCode.substring(1,4)=2502");
  CHECK(c.where->lhs->kind == Expr::Call);
  CHECK(c.where->lhs->operands.size() == 3);
}

TEST_CASE("nested quantors with context prefixes") {
  QueryAst q = parse_query(
      "COUNT Patients p, WHERE EXISTS p.HospitalEpisode e, WHERE EXISTS e.TreatmentWard t, WHERE "
      "EXISTS e.Manipulation m, WHERE m.manipul.code=02078");
  CHECK(q.kind == Template::Count);
  CHECK(q.source.class_name == "Patients");
  CHECK(q.source.short_name == "p");
  std::vector<std::string> contexts;
  const Cond* c = q.where.get();
  while (c && c->kind == Cond::Quantor) {
    contexts.push_back(c->target.context);
    c = c->where.get();
  }
  CHECK(contexts == std::vector<std::string>{"p", "e", "e"});
  REQUIRE(c);
  CHECK(c->kind == Cond::Compare);
  CHECK(c->rhs->text == "02078");
}

TEST_CASE("minimal templates") {
  QueryAst show = parse_query("SHOW Patients");
  CHECK(show.kind == Template::Show);
  CHECK_FALSE(show.limit.has_value());
  CHECK_FALSE(show.where);
  CHECK(parse_query("SHOW 3 Patients").limit == 3);
  CHECK(parse_query("FULLSHOW all Patients").kind == Template::FullShow);
  QueryAst t7 = parse_query(
      "SELECT FROM INTERVAL (1-12) ALL VALUES x, DEFINE TABLE x (COLUMN Month), (COUNT HospitalEpisodes, "
      "WHERE admissionTime.month()=x) (COLUMN Episode_count)");
  CHECK(t7.kind == Template::TableInterval);
  CHECK(t7.columns.size() == 2);
  CHECK(t7.interval_start == 1);
  CHECK(t7.interval_end == 12);
  CHECK(t7.row_variable == "x");
  CHECK(parse_query("MOST diagnosis.code FROM DischargeDiagnoses").agg == AggKind::Most);
  CHECK(parse_query("SELECT FROM TreatmentWards, ATTRIBUTE ward ALL DISTINCT VALUES").kind ==
        Template::Distinct);
}

TEST_CASE("NOT EXISTS is NOTEXISTS") {
  QueryAst a = parse_query("COUNT Patient, WHERE NOT EXISTS HospitalEpisode");
  QueryAst b = parse_query("COUNT Patient, WHERE NOTEXISTS HospitalEpisode");
  CHECK(a.where->quantor == QuantorKind::NotExists);
  CHECK(b.where->quantor == QuantorKind::NotExists);
}

TEST_CASE("AND binds tighter than OR") {
  QueryAst q = parse_query("COUNT Patient, WHERE a=1 OR b=2 AND c=3");
  REQUIRE(q.where->kind == Cond::Or);
  CHECK(q.where->right->kind == Cond::And);
  QueryAst p = parse_query("COUNT Patient, WHERE (a=1 OR b=2) AND c=3");
  REQUIRE(p.where->kind == Cond::And);
  CHECK(p.where->left->kind == Cond::Or);
  CHECK(p.where->left->parenthesized);
}

TEST_CASE("a trailing WHERE extends to the end") {
  QueryAst q = parse_query("COUNT Patient, WHERE EXISTS HospitalEpisode, WHERE totalCost>1 AND surname=x");
  REQUIRE(q.where->kind == Cond::Quantor);
  REQUIRE(q.where->where);
  CHECK(q.where->where->kind == Cond::And);
}

TEST_CASE("table columns, selectors and post-ops") {
  QueryAst q = parse_query(
      "SELECT HospitalEpisodes x, WHERE dischargeReason=deceased, DEFINE TABLE x.surname (COLUMN Surname), "
      "(x.TreatmentWard, WHERE nr=*).ward (COLUMN last_ward), (COUNT x.Manipulation) , KEEP ROWS WHERE "
      "Surname<>nil, SORT DESCENDING BY COLUMN Surname, LEAVE LAST 2 ROWS.");
  REQUIRE(q.columns.size() == 3);
  CHECK(q.columns[0].name == "Surname");
  CHECK(q.columns[1].expr.kind == Expr::Selector);
  CHECK(q.columns[1].expr.where->rhs->kind == Expr::Star);
  CHECK(q.columns[2].expr.kind == Expr::Count);
  CHECK(q.columns[2].name.empty());
  REQUIRE(q.keep);
  REQUIRE(q.sort);
  CHECK(q.sort->descending);
  REQUIRE(q.leave);
  CHECK(q.leave->last);
  CHECK(q.leave->count == 2);
}

TEST_CASE("the of form") {
  QueryAst q = parse_query("COUNT Patient p, WHERE EXISTS HospitalEpisode e of Patient p");
  CHECK(q.where->target.class_name == "HospitalEpisode");
  CHECK(q.where->target.short_name == "e");
  CHECK(q.where->target.context == "p");
  CHECK(q.where->target.of_class == "Patient");
}

TEST_CASE("parse errors report position, expectations and the template so far") {
  ParseError e = parse_error("COUNT WHERE");
  CHECK(e.span().offset == 6);
  CHECK(e.span().length == 5);
  CHECK(e.template_prefix() == "T1 COUNT");
  CHECK(e.expected() == std::vector<std::string>{"class name"});

  ParseError end = parse_error("COUNT Patients p, WHERE");
  CHECK(end.span().offset == 23);
  CHECK(end.span().length == 0);

  ParseError head = parse_error("LEAVE FIRST 0 ROWS");
  CHECK(head.span().offset == 0);
  CHECK(head.template_prefix().empty());
  CHECK(head.expected().size() == 9);

  CHECK_THROWS_AS(parse_query("SELECT Patient x, DEFINE TABLE x.surname, LEAVE FIRST 0 ROWS"), ParseError);
  CHECK_THROWS_AS(parse_query("COUNT Patient, WHERE a=1 LEAVE"), ParseError);
  CHECK_THROWS_AS(parse_query(""), ParseError);
}

TEST_CASE("every golden query parses") {
  auto queries = golden();
  CHECK(queries.size() == 20);
  for (const auto& q : queries) {
    CAPTURE(q);
    CHECK_NOTHROW(parse_query(q));
  }
}
