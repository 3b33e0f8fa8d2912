#ifndef SRMUSIC_MEASUREMENTS_HPP
#define SRMUSIC_MEASUREMENTS_HPP

#include <filesystem>
#include <iosfwd>

#include "srmusic/music.hpp"
#include "srmusic/types.hpp"

namespace srmusic
{

// Measurement files hold y_0 .. y_M, one "index,re,im" row each (an optional
// header row is skipped; rows may come in any order but every index must
// appear exactly once). JSON input is an array of [re, im] pairs or of
// {"index", "re", "im"} objects, optionally under "measurements".

CVectorXd read_measurements_csv(std::istream& is);
CVectorXd read_measurements(const std::filesystem::path& path);
void write_measurements_csv(std::ostream& os, const CVectorXd& y);

/// omega,R,J per grid node; J = inf where R vanishes.
void write_imaging_grid_csv(std::ostream& os, const ImagingGrid& grid);

} // namespace srmusic

#endif // SRMUSIC_MEASUREMENTS_HPP
