#ifndef BLOCKSEL_VERSION_HPP
#define BLOCKSEL_VERSION_HPP

#define BLOCKSEL_VERSION "0.1.0"

#endif  // BLOCKSEL_VERSION_HPP
