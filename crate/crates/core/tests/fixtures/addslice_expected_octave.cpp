#include <octave/oct.h>
#include <iostream>
#include <cstdlib>
DEFUN_DLD (addslice, args, nargout, "") {    
    octave_value_list retval;

    int32NDArray x=args(0).int32_array_value();
    int32NDArray y=args(1).int32_array_value();
    if ((x.rows() < 3 || x.columns() < 3 || y.rows() < 3 || y.columns() < 3)) {
        error("Matrices should be of size at least 3x3");
        return retval;
    }
    int32NDArray z(dim_vector( 3,  3));
    z = ((int32NDArray)x.index(idx_vector(1-1, 2-1+1, 1), idx_vector(1-1, 2-1+1, 1)))
            + ((int32NDArray)y.index(idx_vector(2-1, 3-1+1, 1), idx_vector(2-1, 3-1+1, 1)));
    retval(0) = z;
    return retval;
}
