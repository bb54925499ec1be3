// Writes a planted-structure dataset as CSV, for demos and smoke tests.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "comindex/csv.hpp"
#include "comindex/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic cases x indicators CSV with planted factors"};
  comindex::PlantedModel model;
  std::string out_path;
  app.add_option("--out,-o", out_path, "Output CSV path")->required();
  app.add_option("--cases", model.n_cases, "Number of cases")->capture_default_str();
  app.add_option("--factors", model.n_factors, "Planted factors")->capture_default_str();
  app.add_option("--vars-per-factor", model.vars_per_factor)->capture_default_str();
  app.add_option("--noise-variables", model.noise_variables)->capture_default_str();
  app.add_option("--noise-sd", model.noise_sd)->capture_default_str();
  app.add_option("--seed", model.seed)->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const auto data = comindex::make_planted_dataset(model);
    const auto& ds = data.dataset;
    std::ofstream out(out_path, std::ios::binary);
    comindex::csv::Row header{"case_id"};
    header.insert(header.end(), ds.indicator_names().begin(), ds.indicator_names().end());
    out << comindex::csv::join(header) << '\n';
    for (std::size_t i = 0; i < ds.n_cases(); ++i) {
      comindex::csv::Row row{ds.case_ids()[i]};
      for (double v : ds.values().row(i)) row.push_back(comindex::csv::format_double(v));
      out << comindex::csv::join(row) << '\n';
    }
    if (!out) {
      std::cerr << "cannot write " << out_path << '\n';
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
