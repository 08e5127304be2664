#ifndef SYNCSCOPE_ERROR_HPP
#define SYNCSCOPE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace syncscope {

// Root of every exception the library throws. Catching this is enough for
// callers that only need "parse failed, here is why".
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace syncscope

#endif // SYNCSCOPE_ERROR_HPP
