#include <octave/oct.h>
#include <iostream>
#include <cstdlib>
DEFUN_DLD (mymult, args, nargout, "") {    
    octave_value_list retval;

    NDArray x=args(0).array_value();
    NDArray y=args(1).array_value();
    int d1x = x.rows();
    int d2x = x.columns();
    int d1y = y.rows();
    int d2y = y.columns();
    if ((d2x != d1y)) {
        std::cout<<"error"<<"incompatible dimensions"<<"\n";return retval;
    }
    int32NDArray z(dim_vector( d1x,  d2y));
    int i;
    int j;
    int k;
    for (i = (0); i <= (d1x - 1); i += (1)) {
        for (j = (0); j <= (d2y - 1); j += (1)) {
            z.xelem(i, j) = 0;
            for (k = (0); k <= (d1y - 1); k += (1)) {
                z.xelem(i, j) = 
                   z.xelem(i, j) + x.xelem(i, k) * y.xelem(k, j);
            }
        }
    }
    retval(0) = z;
    return retval;
}
