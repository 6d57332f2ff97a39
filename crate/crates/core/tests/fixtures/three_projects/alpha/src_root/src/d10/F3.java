package fixture;

public class F3 {
    int m0(int a, int b) {
        a = b > 3 ? a : b; // pick
        return a;
    }
    int m1(int a, int b) {
        a = b > 3 ? a : b; // pick
        return a;
    }
    int m2(int a, int b) {
        a = b > 3 ? a : b; // pick
        a = b > 3 ? a : b; // pick
        a = b > 3 ? a : b; // pick
        if (a > b && b > 0) { a -= b; }
        return a;
    }
    int m3(int a, int b) {
        for (int i = 0; i < b; i++) { a += i; }
        a = b > 3 ? a : b; // pick
        for (int i = 0; i < b; i++) { a += i; }
        a += 1;
        return a;
    }
}
