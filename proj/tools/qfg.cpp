#include <CLI11.hpp>

#include <iostream>
#include <map>

#include <qfg/app.hpp>

int main(int argc, char **argv) {
  using qfg::app::Format;
  qfg::app::RunConfig config;

  CLI::App app{"Finite groups as quantum-graph symmetries"};
  app.require_subcommand(1);
  const std::map<std::string, Format> formats{
      {"json", Format::Json}, {"text", Format::Text}, {"dot", Format::Dot}, {"csv", Format::Csv}};

  auto common = [&](CLI::App *sub) {
    sub->add_option("--format", config.format, "json | text | dot | csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--out", config.out, "write the report here instead of stdout");
  };
  auto numerics = [&](CLI::App *sub) {
    sub->add_option("--mesh", config.mesh_n, "cells per edge")->capture_default_str();
    sub->add_option("--modes", config.modes, "eigenmodes (spectrum) or evolution modes (default: all)");
    sub->add_option("--tol", config.tol, "domain / form tolerance")->capture_default_str();
    sub->add_option("--commutator-tol", config.commutator_tol)->capture_default_str();
    sub->add_option("--evolution-tol", config.evolution_tol)->capture_default_str();
    sub->add_option("--seed", config.seed, "random test states")->capture_default_str();
  };

  auto *build = app.add_subcommand("build", "group file -> Frucht graph");
  build->add_option("group", config.inputs, "group file")->required();
  build->add_option("--graph-out", config.graph_out, "write the graph file");
  common(build);

  auto *aut = app.add_subcommand("aut", "graph file -> A(G), A*(G), A'(G), Whitney status");
  aut->add_option("graph", config.inputs, "graph file")->required();
  common(aut);

  auto *spectrum = app.add_subcommand("spectrum", "graph file -> Laplacian eigenvalues");
  spectrum->add_option("graph", config.inputs, "graph file")->required();
  common(spectrum);
  numerics(spectrum);

  auto *verify = app.add_subcommand("verify", "graph file -> symmetry certificates");
  verify->add_option("graph", config.inputs, "graph file")->required();
  verify->add_flag("--explore-flips", config.explore_flips, "search orientation flips for non-induced edge maps");
  common(verify);
  numerics(verify);

  auto *realize = app.add_subcommand("realize", "group file -> Frucht graph -> certificates");
  realize->add_option("group", config.inputs, "group file")->required();
  common(realize);
  numerics(realize);

  auto *counter = app.add_subcommand("counterexample", "non-induced edge symmetry that is no quantum-graph symmetry");
  counter->add_option("name", config.inputs, "paw")->required()->check(CLI::IsMember({"paw"}));
  common(counter);
  numerics(counter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qfg::app::exit_code::other;
  }
  config.subcommand = app.get_subcommands().front()->get_name();

  try {
    config.caps = qfg::caps_from_environment();
  } catch (const qfg::ParseError &e) {
    std::cerr << "qfg: parse error: " << e.what() << '\n';
    return qfg::app::exit_code::parse_error;
  }
  return qfg::app::run(config, std::cout, std::cerr);
}
