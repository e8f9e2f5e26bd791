// Labels an unlabeled pool from an encoder x class FAD grid: the class with
// the lowest average distance across encoders wins.

#include <iomanip>
#include <iostream>

#include "sertk/fad/score_table.hpp"

int main() {
  const auto table = sertk::fad::table_from_scores({"VGGish", "EnCodec", "wav2vec 2.0", "CLAP"},
                                                   {"Angry", "Happy", "Neutral", "Sad"},
                                                   {{4.12, 3.98, 6.87, 12.20},
                                                    {35.33, 42.56, 57.24, 89.65},
                                                    {54.66, 58.49, 88.78, 109.02},
                                                    {45.46, 182.65, 141.75, 230.39}},
                                                   true);
  std::cout << std::fixed << std::setprecision(3);
  for (std::size_t c = 0; c < table.classes.size(); ++c)
    std::cout << std::setw(8) << table.classes[c] << "  average " << table.average[c] << "  normalized "
              << (*table.normalized_average)[c] << '\n';
  const auto label = sertk::fad::assign_pseudo_label(table);
  std::cout << "pseudo-label: " << label.label << (label.tie ? " (tie)" : "") << '\n';
}
