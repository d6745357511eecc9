// Catch2 provides its own main through the amalgamated translation unit.
